#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "iotnames/pcap.hpp"
#include "iotnames/random.hpp"
#include "support/fixtures.hpp"
#include "support/pcap_builder.hpp"

namespace iotnames::pcap {
namespace {

using test::UdpEndpoints;

std::vector<std::string> texts(const NameList& list) {
  std::vector<std::string> out;
  for (const auto& n : list) out.push_back(n.text());
  return out;
}

UdpEndpoints to_mac(std::uint8_t last) {
  UdpEndpoints e;
  e.dst_mac = {0x02, 0, 0, 0, 0, last};
  e.src_ip = test::ipv4(10, 0, 0, 1);
  e.dst_ip = test::ipv4(10, 0, 0, last);
  return e;
}

DeviceMap two_devices() {
  return DeviceMap::parse("address,class\n02:00:00:00:00:01,iot-m2m\n10.0.0.2,other\n");
}

TEST(PcapFixture, CommittedFileMatchesBuilder) {
  const auto bytes = test::read_file(test::data_dir() / "three_responses.pcap");
  const auto built = serialize_capture(test::three_packet_capture());
  EXPECT_EQ(Bytes(bytes.begin(), bytes.end()), built);
}

TEST(PcapFixture, ThreePacketExtraction) {
  const auto capture = read_capture(test::data_dir() / "three_responses.pcap");
  ASSERT_EQ(capture.packets.size(), 3u);
  const auto devices = DeviceMap::load(test::data_dir() / "three_responses_devices.csv");
  const auto r = extract_qnames(capture, devices);
  EXPECT_EQ(texts(r.lists.at(NameClass::IotM2M)), std::vector<std::string>{"cam.example.com"});
  EXPECT_TRUE(r.lists.at(NameClass::Other).empty());
  EXPECT_EQ(r.unmapped, 1u);
  EXPECT_EQ(r.dns_responses, 3u);
  EXPECT_EQ(r.parse_failures, 0u);
}

TEST(PcapFormat, BothByteOrdersAndNanoseconds) {
  for (bool swapped : {false, true}) {
    for (bool nanos : {false, true}) {
      auto capture = test::three_packet_capture();
      capture.header.swapped = swapped;
      capture.header.nanosecond = nanos;
      const auto back = parse_capture(serialize_capture(capture));
      EXPECT_EQ(back.header.swapped, swapped);
      EXPECT_EQ(back.header.nanosecond, nanos);
      ASSERT_EQ(back.packets.size(), 3u);
      for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.packets[i].data, capture.packets[i].data);
        EXPECT_EQ(back.packets[i].ts_sec, capture.packets[i].ts_sec);
      }
    }
  }
}

TEST(PcapFormat, BadMagicIsFormatError) {
  Bytes junk(24, 0x11);
  EXPECT_THROW(parse_capture(junk), FormatError);
  EXPECT_THROW(parse_capture(Bytes(10, 0)), FormatError);
}

TEST(PcapFormat, TruncatedRecordFlagged) {
  auto bytes = serialize_capture(test::three_packet_capture());
  bytes.resize(bytes.size() - 5);
  const auto c = parse_capture(bytes);
  EXPECT_TRUE(c.truncated);
  EXPECT_EQ(c.packets.size(), 2u);
}

TEST(Extraction, NoDnsPacketsGiveEmptyLists) {
  auto e = to_mac(1);
  e.src_port = 123;
  const auto capture = test::make_capture({test::udp_frame(e, Bytes{1, 2, 3})});
  const auto r = extract_qnames(capture, two_devices());
  EXPECT_TRUE(r.lists.at(NameClass::IotM2M).empty());
  EXPECT_TRUE(r.lists.at(NameClass::Other).empty());
  EXPECT_EQ(r.skipped, 1u);
}

TEST(Extraction, QueriesAreNotResponses) {
  auto e = to_mac(1);
  const auto capture = test::make_capture({test::udp_frame(e, test::dns_query_bytes("a.example", 1))});
  const auto r = extract_qnames(capture, two_devices());
  EXPECT_TRUE(r.lists.at(NameClass::IotM2M).empty());
}

TEST(Extraction, HundredRepeatsAppearOnce) {
  std::vector<Bytes> frames;
  for (int i = 0; i < 100; ++i) {
    frames.push_back(test::udp_frame(to_mac(1), test::dns_response_bytes("cam.example.com", static_cast<std::uint16_t>(i))));
  }
  const auto r = extract_qnames(test::make_capture(frames), two_devices());
  EXPECT_EQ(r.lists.at(NameClass::IotM2M).size(), 1u);
}

TEST(Extraction, MacBeatsIp) {
  // MAC says iot-m2m, IP says other.
  auto e = to_mac(1);
  e.dst_ip = test::ipv4(10, 0, 0, 2);
  const auto r = extract_qnames(test::make_capture({test::udp_frame(e, test::dns_response_bytes("x.example", 1))}),
                                two_devices());
  EXPECT_EQ(r.lists.at(NameClass::IotM2M).size(), 1u);
  EXPECT_TRUE(r.lists.at(NameClass::Other).empty());
}

TEST(Extraction, IpMatchAndIpv6AndVlan) {
  auto map = two_devices();
  map.add("fd00::7", NameClass::IotM2M);

  auto v4 = to_mac(2);
  auto v6 = to_mac(9);
  v6.src_ip = test::ipv6_with_suffix(1);
  v6.dst_ip = test::ipv6_with_suffix(7);
  v6.vlan = 12;
  const auto capture = test::make_capture({
      test::udp_frame(v4, test::dns_response_bytes("other.example.net", 1)),
      test::udp_frame(v6, test::dns_response_bytes("v6.example.net", 2)),
  });
  const auto r = extract_qnames(capture, map);
  EXPECT_EQ(texts(r.lists.at(NameClass::Other)), std::vector<std::string>{"other.example.net"});
  EXPECT_EQ(texts(r.lists.at(NameClass::IotM2M)), std::vector<std::string>{"v6.example.net"});
}

TEST(Extraction, MalformedPayloadCountedNotFatal) {
  auto e = to_mac(1);
  Bytes bad = test::dns_response_bytes("cam.example.com", 1);
  bad.resize(15);
  const auto capture = test::make_capture({
      test::udp_frame(e, bad),
      Bytes{1, 2, 3},
      test::udp_frame(e, test::dns_response_bytes("ok.example.com", 2)),
  });
  const auto r = extract_qnames(capture, two_devices());
  EXPECT_EQ(r.parse_failures, 2u);
  EXPECT_EQ(r.lists.at(NameClass::IotM2M).size(), 1u);
}

TEST(Extraction, OrderInsensitive) {
  Rng rng(8);
  std::vector<Bytes> frames;
  for (int i = 0; i < 60; ++i) {
    const auto dev = static_cast<std::uint8_t>(1 + rng.uniform_index(3));
    frames.push_back(test::udp_frame(to_mac(dev), test::dns_response_bytes(
                                                      "h" + std::to_string(rng.uniform_index(25)) + ".example.com",
                                                      static_cast<std::uint16_t>(i))));
  }
  const auto base = extract_qnames(test::make_capture(frames), two_devices());
  for (int round = 0; round < 10; ++round) {
    rng.shuffle(frames);
    const auto r = extract_qnames(test::make_capture(frames), two_devices());
    for (auto cls : {NameClass::IotM2M, NameClass::Other}) {
      EXPECT_EQ(texts(r.lists.at(cls)), texts(base.lists.at(cls)));
    }
    EXPECT_EQ(r.unmapped, base.unmapped);
  }
}

TEST(DeviceMapParsing, RejectsBadRows) {
  EXPECT_THROW(DeviceMap::parse("zz:zz,iot-m2m\n"), InputError);
  EXPECT_THROW(DeviceMap::parse("10.0.0.1,printer\n"), InputError);
  EXPECT_EQ(DeviceMap::parse("# comment\n\n10.0.0.1,other\n").size(), 1u);
}

}  // namespace
}  // namespace iotnames::pcap
