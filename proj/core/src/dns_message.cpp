#include "iotnames/dns_message.hpp"

#include <algorithm>

namespace iotnames::dns {
namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  void name(const std::vector<std::string>& labels) {
    std::size_t wire = 1;
    for (const auto& label : labels) {
      if (label.empty()) throw EncodeError("empty label");
      if (label.size() > kMaxWireLabel) {
        throw EncodeError("label '" + label + "' exceeds 63 bytes");
      }
      wire += label.size() + 1;
    }
    if (wire > kMaxWireName) throw EncodeError("name exceeds 255 bytes on the wire");
    for (const auto& label : labels) {
      u8(static_cast<std::uint8_t>(label.size()));
      out_.insert(out_.end(), label.begin(), label.end());
    }
    u8(0);
  }

  void record(const ResourceRecord& rr) {
    if (rr.rdata.size() > 0xFFFF) throw EncodeError("rdata exceeds 65535 bytes");
    name(rr.name);
    u16(rr.type);
    u16(rr.rclass);
    u32(rr.ttl);
    u16(static_cast<std::uint16_t>(rr.rdata.size()));
    bytes(rr.rdata);
  }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> wire) : wire_(wire) {}

  std::size_t offset() const noexcept { return pos_; }

  void need(std::size_t n) const {
    if (pos_ + n > wire_.size()) {
      throw DecodeError(DecodeError::Kind::Truncated, pos_, "message truncated");
    }
  }
  std::uint8_t u8() {
    need(1);
    return wire_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((wire_[pos_] << 8) | wire_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  Bytes bytes(std::size_t n) {
    need(n);
    Bytes b(wire_.begin() + static_cast<std::ptrdiff_t>(pos_),
            wire_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return b;
  }

  std::vector<std::string> name() {
    std::vector<std::string> labels;
    std::size_t cursor = pos_;
    std::size_t wire_length = 1;
    bool jumped = false;
    while (true) {
      if (cursor >= wire_.size()) {
        throw DecodeError(DecodeError::Kind::Truncated, cursor, "name runs past end of message");
      }
      const std::uint8_t len = wire_[cursor];
      if ((len & 0xC0) == 0xC0) {
        if (cursor + 1 >= wire_.size()) {
          throw DecodeError(DecodeError::Kind::Truncated, cursor, "truncated compression pointer");
        }
        const std::size_t target = static_cast<std::size_t>(((len & 0x3F) << 8) | wire_[cursor + 1]);
        if (target >= wire_.size()) {
          throw DecodeError(DecodeError::Kind::PointerOutOfRange, cursor,
                            "compression pointer beyond end of message");
        }
        // Strictly backwards pointers cannot cycle.
        if (target >= cursor) {
          throw DecodeError(DecodeError::Kind::PointerLoop, cursor, "compression pointer loop");
        }
        if (!jumped) pos_ = cursor + 2;
        jumped = true;
        cursor = target;
        continue;
      }
      if ((len & 0xC0) != 0) {
        throw DecodeError(DecodeError::Kind::BadLabel, cursor, "unsupported label type");
      }
      if (len == 0) {
        if (!jumped) pos_ = cursor + 1;
        return labels;
      }
      if (cursor + 1 + len > wire_.size()) {
        throw DecodeError(DecodeError::Kind::Truncated, cursor, "label runs past end of message");
      }
      wire_length += len + 1u;
      if (wire_length > kMaxWireName) {
        throw DecodeError(DecodeError::Kind::NameTooLong, cursor, "name exceeds 255 bytes");
      }
      labels.emplace_back(reinterpret_cast<const char*>(wire_.data() + cursor + 1), len);
      cursor += 1 + len;
    }
  }

  ResourceRecord record() {
    ResourceRecord rr;
    rr.name = name();
    rr.type = u16();
    rr.rclass = u16();
    rr.ttl = u32();
    const std::uint16_t rdlength = u16();
    rr.rdata = bytes(rdlength);
    return rr;
  }

 private:
  std::span<const std::uint8_t> wire_;
  std::size_t pos_ = 0;
};

}  // namespace

DecodeError::DecodeError(Kind kind, std::size_t offset, const std::string& what)
    : InputError(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

std::string rcode_name(std::uint8_t rcode) {
  switch (rcode) {
    case 0: return "NOERROR";
    case 1: return "FORMERR";
    case 2: return "SERVFAIL";
    case 3: return "NXDOMAIN";
    case 4: return "NOTIMP";
    case 5: return "REFUSED";
    default: return "RCODE" + std::to_string(rcode);
  }
}

Bytes encode(const Message& m) {
  const auto& h = m.header;
  if (m.questions.size() > 0xFFFF || m.answers.size() > 0xFFFF || m.authority.size() > 0xFFFF ||
      m.additional.size() > 0xFFFF) {
    throw EncodeError("section too large");
  }
  Writer w;
  w.u16(h.id);
  std::uint16_t flags = 0;
  flags |= static_cast<std::uint16_t>(h.qr) << 15;
  flags |= static_cast<std::uint16_t>(h.opcode & 0xF) << 11;
  flags |= static_cast<std::uint16_t>(h.aa) << 10;
  flags |= static_cast<std::uint16_t>(h.tc) << 9;
  flags |= static_cast<std::uint16_t>(h.rd) << 8;
  flags |= static_cast<std::uint16_t>(h.ra) << 7;
  flags |= static_cast<std::uint16_t>(h.rcode & 0xF);
  w.u16(flags);
  w.u16(static_cast<std::uint16_t>(m.questions.size()));
  w.u16(static_cast<std::uint16_t>(m.answers.size()));
  w.u16(static_cast<std::uint16_t>(m.authority.size()));
  w.u16(static_cast<std::uint16_t>(m.additional.size()));
  for (const auto& q : m.questions) {
    w.name(q.qname.labels());
    w.u16(q.qtype);
    w.u16(q.qclass);
  }
  for (const auto& rr : m.answers) w.record(rr);
  for (const auto& rr : m.authority) w.record(rr);
  for (const auto& rr : m.additional) w.record(rr);
  return w.take();
}

Message decode(std::span<const std::uint8_t> wire) {
  Reader r(wire);
  Message m;
  m.header.id = r.u16();
  const std::uint16_t flags = r.u16();
  m.header.qr = (flags >> 15) & 1;
  m.header.opcode = static_cast<std::uint8_t>((flags >> 11) & 0xF);
  m.header.aa = (flags >> 10) & 1;
  m.header.tc = (flags >> 9) & 1;
  m.header.rd = (flags >> 8) & 1;
  m.header.ra = (flags >> 7) & 1;
  m.header.rcode = static_cast<std::uint8_t>(flags & 0xF);
  const std::uint16_t qd = r.u16();
  const std::uint16_t an = r.u16();
  const std::uint16_t ns = r.u16();
  const std::uint16_t ar = r.u16();

  for (std::uint16_t i = 0; i < qd; ++i) {
    const std::size_t at = r.offset();
    auto labels = r.name();
    if (labels.empty()) {
      throw DecodeError(DecodeError::Kind::EmptyQuestionName, at, "question for the root name");
    }
    for (auto& label : labels) {
      if (label.find('.') != std::string::npos) {
        throw DecodeError(DecodeError::Kind::BadLabel, at, "label contains a dot");
      }
    }
    Question q{DomainName(std::move(labels)), 0, 0};
    q.qtype = r.u16();
    q.qclass = r.u16();
    m.questions.push_back(std::move(q));
  }
  for (std::uint16_t i = 0; i < an; ++i) m.answers.push_back(r.record());
  for (std::uint16_t i = 0; i < ns; ++i) m.authority.push_back(r.record());
  for (std::uint16_t i = 0; i < ar; ++i) m.additional.push_back(r.record());
  return m;
}

Bytes encode_query(const DomainName& name, RecordType qtype, std::uint16_t id,
                   const QueryOptions& options) {
  Message m;
  m.header.id = id;
  m.header.rd = options.recursion_desired;
  m.questions.push_back(Question{name, static_cast<std::uint16_t>(qtype), kClassIn});
  if (options.edns_payload) {
    ResourceRecord opt;
    opt.type = static_cast<std::uint16_t>(RecordType::OPT);
    opt.rclass = *options.edns_payload;
    m.additional.push_back(std::move(opt));
  }
  return encode(m);
}

Message make_response(const Message& query, std::uint8_t rcode, std::vector<ResourceRecord> answers) {
  Message r;
  r.header = query.header;
  r.header.qr = true;
  r.header.ra = true;
  r.header.rcode = rcode;
  r.questions = query.questions;
  r.answers = std::move(answers);
  return r;
}

}  // namespace iotnames::dns
