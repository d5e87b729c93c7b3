#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "iotnames/corpus.hpp"
#include "iotnames/dns_message.hpp"
#include "iotnames/sanitizer.hpp"

namespace {

using namespace iotnames;

std::vector<std::string> raw_names(std::size_t n) {
  std::vector<std::string> out;
  for (const auto& name : generate_fixtures(FixtureKind::Mixed, n, 1)) out.push_back(name.text());
  // A few rejects so every rule path runs.
  out.push_back(".lead.example");
  out.push_back("a..b");
  out.push_back("ab--cd.example");
  out.push_back("localhost");
  return out;
}

void BM_CheckSyntax(benchmark::State& state) {
  const auto names = raw_names(1000);
  for (auto _ : state) {
    std::size_t accepted = 0;
    for (const auto& n : names) accepted += check_syntax(n).accepted();
    benchmark::DoNotOptimize(accepted);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(names.size()));
}
BENCHMARK(BM_CheckSyntax);

void BM_SanitizeList(benchmark::State& state) {
  const auto names = raw_names(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sanitize_list(names));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(names.size()));
}
BENCHMARK(BM_SanitizeList)->Arg(300)->Arg(2500);

void BM_DnsQueryRoundTrip(benchmark::State& state) {
  const auto name = parse_name("sensor.eu-west-1.example.com");
  std::uint16_t id = 0;
  for (auto _ : state) {
    const auto wire = dns::encode_query(name, dns::RecordType::A, ++id);
    benchmark::DoNotOptimize(dns::decode(wire));
  }
}
BENCHMARK(BM_DnsQueryRoundTrip);

void BM_GenerateFixtures(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_fixtures(FixtureKind::IotLike, 1415, 3));
}
BENCHMARK(BM_GenerateFixtures);

}  // namespace
