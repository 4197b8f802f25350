#include "clamm/ingest/event_csv.hpp"
#include "clamm/ingest/flow.hpp"
#include "clamm/ingest/registry.hpp"
#include "clamm/ingest/replay.hpp"
#include "clamm/ingest/stats.hpp"
#include "clamm/pool/snapshot.hpp"
#include "support/events.hpp"
#include "support/fixture_gen.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

using namespace clamm;
using namespace clamm::ingest;

namespace {

const std::string kHeader =
    "schema_version,chain,pool,block_number,timestamp,tx_hash,log_index,kind,owner,tick_lower,tick_upper,"
    "liquidity_delta,amount0,amount1,sqrt_price_x96,liquidity_after,tick_after,tx_to,gas_fee_usd\n";
const std::string kInit = "1,ethereum,0xAA,10,1000,0x01,0,Initialize,,,,,,,79228162514264337593543950336,,0,,\n";

ChainDataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_events(in, "events.csv");
}

std::string write(const std::vector<PoolEvent>& events) {
  std::ostringstream out;
  write_events(out, events);
  return out.str();
}

PoolConfig fixture_config(const fixture::Spec& s) { return PoolConfig{s.fee_pips, s.tick_spacing}; }

}  // namespace

TEST_CASE("load: empty inputs") {
  CHECK(parse("").events.empty());
  CHECK(parse(kHeader).events.empty());
  CHECK(parse(kHeader + "\n").events.empty());
}

TEST_CASE("load: validation errors name the line") {
  auto error_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const IngestError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string mint = "1,ethereum,0xaa,10,1000,0x02,1,Mint,alice,-60,60,100,5,5,,,,,\n";

  CHECK(error_of(kHeader + kInit + mint) == "no error");
  CHECK_THAT(error_of(kHeader + mint + kInit),
             Catch::Matchers::ContainsSubstring("events.csv:3:") && Catch::Matchers::ContainsSubstring("out of order"));
  CHECK_THAT(error_of(kHeader + kInit + kInit), Catch::Matchers::ContainsSubstring("events.csv:3: duplicate"));
  CHECK_THAT(error_of(kHeader + kInit + "1,ethereum,0xaa,10,1000,0x02,1,Mint,alice,-60,60,-100,5,5,,,,,\n"),
             Catch::Matchers::ContainsSubstring("negative liquidity_delta"));
  CHECK_THAT(error_of(kHeader + kInit + "1,ethereum,0xaa,11,1000,0x02,0,Swap,,,,,5,-5,,,,,\n"),
             Catch::Matchers::ContainsSubstring("Swap row missing sqrt_price_x96"));
  CHECK_THAT(error_of("2" + kHeader.substr(1)), Catch::Matchers::ContainsSubstring("events.csv:1: header"));
  CHECK_THAT(error_of(kHeader + "2" + kInit.substr(1)), Catch::Matchers::ContainsSubstring("schema version 2"));
  CHECK_THAT(error_of(kHeader + kInit + "1,optimism,0xaa,10,1000,0x02,1,Mint,alice,-60,60,100,5,5,,,,,\n"),
             Catch::Matchers::ContainsSubstring("chain 'optimism'"));
  CHECK_THAT(error_of(kHeader + kInit + "1,ethereum,0xaa,11,1000,0x02,0,Mint,alice,-60,60,1,5\n"),
             Catch::Matchers::ContainsSubstring("expected 19 fields"));
  CHECK_THAT(error_of(kHeader + kInit + "1,ethereum,0xaa,11,999,0x02,0,Mint,alice,-60,60,1,5,5,,,,,\n"),
             Catch::Matchers::ContainsSubstring("timestamp decreases"));
  CHECK_THAT(error_of(kHeader + kInit + "1,ethereum,0xaa,11,1000,0x02,0,Mint,alice,-60,60,1,5,5,,,,,-1\n"),
             Catch::Matchers::ContainsSubstring("gas_fee_usd"));
  CHECK_THAT(error_of(kHeader + kInit + "1,ethereum,0xaa,11,1000,0x02,0,Collect,alice,,,,,,,,,,\n"),
             Catch::Matchers::ContainsSubstring("unknown kind"));
}

TEST_CASE("load: tab separated and normalisation") {
  std::string tsv = kHeader + kInit;
  std::replace(tsv.begin(), tsv.end(), ',', '\t');
  const ChainDataset ds = parse(tsv);
  REQUIRE(ds.events.size() == 1);
  CHECK(ds.chain == "ethereum");
  CHECK(ds.events[0].pool == "0xaa");
  CHECK(ds.events[0].sqrt_price_x96->raw() == kQ96);
  CHECK(!ds.events[0].gas_fee_usd);
}

TEST_CASE("load: generated fixture round-trips byte-identically") {
  fixture::Spec spec;
  spec.events = 2000;
  spec.seed = 5;
  const auto gen = fixture::generate(spec);
  const std::string first = write(gen.dataset.events);
  const ChainDataset loaded = parse(first);
  CHECK(loaded.events.size() == gen.dataset.events.size());
  CHECK(write(loaded.events) == first);
}

TEST_CASE("replay: initialize and mint") {
  PoolState ref(PoolConfig{3000, 60});
  ref.initialize(tick_to_sqrt_price(0));
  const auto amounts = ref.mint("alice", -600, 600, u128(1000000));
  ChainDataset ds;
  ds.chain = "ethereum";
  ds.events = {ev::initialize(1, 100, 0),
               ev::position(EventKind::Mint, 2, 0, 112, "alice", -600, 600, 1000000, amounts.amount0, amounts.amount1)};
  const auto r = replay(ds, ev::kPool, PoolConfig{3000, 60});
  CHECK(r.state.liquidity() == 1000000);
  CHECK(r.audit.empty());
  CHECK(r.events_applied == 2);
  CHECK(state_hash(r.state) == state_hash(ref));
}

TEST_CASE("replay: engine errors carry event coordinates") {
  ChainDataset ds;
  ds.events = {ev::position(EventKind::Mint, 1, 0, 100, "alice", -60, 60, 10)};
  CHECK_THROWS_WITH(replay(ds, ev::kPool, PoolConfig{}), Catch::Matchers::ContainsSubstring("event 1:0: Mint before"));

  ds.events = {ev::initialize(1, 100, 0), ev::position(EventKind::Mint, 2, 3, 100, "alice", -60, 60, 10),
               ev::position(EventKind::Burn, 5, 7, 100, "alice", -60, 60, 11)};
  try {
    replay(ds, ev::kPool, PoolConfig{});
    FAIL("expected replay error");
  } catch (const ReplayError& e) {
    CHECK(e.coord() == EventCoord{5, 7});
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("exceeds position liquidity"));
  }
}

TEST_CASE("replay: generated log matches the straight-line reference") {
  fixture::Spec spec;
  spec.events = 1000;
  spec.seed = 17;
  const auto gen = fixture::generate(spec);
  const auto r = replay(gen.dataset, spec.pool, fixture_config(spec), ReplayOptions{std::nullopt, 0, true});
  CHECK(r.audit.empty());
  CHECK(r.events_applied == spec.events);
  const auto& ref = gen.final_state;
  CHECK(oracle::to_big(r.state.sqrt_price().raw()) == ref.price());
  CHECK(r.state.tick() == ref.tick());
  CHECK(oracle::big(r.state.liquidity()) == ref.liquidity());
  CHECK(oracle::to_big(r.state.fee_growth_global_0().raw()) == ref.fg0());
  CHECK(oracle::to_big(r.state.fee_growth_global_1().raw()) == ref.fg1());
  CHECK(r.state.ticks().entries().size() == ref.ticks().size());
  for (const auto& [key, rp] : ref.positions()) {
    const auto& [owner, lo, hi] = key;
    const Position* p = r.state.position(owner, lo, hi);
    REQUIRE(p);
    CHECK(oracle::big(p->liquidity) == rp.liquidity);
    CHECK(oracle::big(p->tokens_owed_0) == rp.owed0);
    CHECK(oracle::big(p->tokens_owed_1) == rp.owed1);
  }
}

TEST_CASE("replay: snapshot hashes are deterministic and gridded") {
  fixture::Spec spec;
  spec.events = 600;
  spec.seed = 3;
  const auto gen = fixture::generate(spec);
  auto run = [&] {
    std::vector<std::pair<std::int64_t, std::string>> hashes;
    replay(gen.dataset, spec.pool, fixture_config(spec), ReplayOptions{std::nullopt, 900, false},
           [&](std::int64_t t, const PoolState& s) { hashes.emplace_back(t, state_hash(s)); });
    return hashes;
  };
  const auto a = run();
  const auto b = run();
  CHECK(a == b);
  REQUIRE(a.size() > 5);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].first % 900 == 0);
  CHECK(a.back().first <= gen.dataset.events.back().timestamp);
}

TEST_CASE("replay: snapshot takes last state at or before each grid time") {
  PoolState s(PoolConfig{3000, 60});
  s.initialize(tick_to_sqrt_price(0));
  ChainDataset ds;
  ds.events.push_back(ev::initialize(1, 100, 0));
  const auto m1 = s.mint("a", -60, 60, 10);
  ds.events.push_back(ev::position(EventKind::Mint, 2, 0, 900, "a", -60, 60, 10, m1.amount0, m1.amount1));
  const auto m2 = s.mint("a", -60, 60, 5);
  ds.events.push_back(ev::position(EventKind::Mint, 3, 0, 2000, "a", -60, 60, 5, m2.amount0, m2.amount1));
  std::vector<std::pair<std::int64_t, std::string>> seen;
  replay(ds, ev::kPool, PoolConfig{3000, 60}, ReplayOptions{std::nullopt, 900, false},
         [&](std::int64_t t, const PoolState& st) { seen.emplace_back(t, st.liquidity().str()); });
  using V = std::vector<std::pair<std::int64_t, std::string>>;
  CHECK(seen == V{{900, "10"}, {1800, "10"}});

  seen.clear();
  const auto cut = replay(ds, ev::kPool, PoolConfig{3000, 60}, ReplayOptions{EventCoord{2, 0}, 900, false},
                          [&](std::int64_t t, const PoolState& st) { seen.emplace_back(t, st.liquidity().str()); });
  CHECK(cut.state.liquidity() == 10);
  CHECK(cut.last_event == EventCoord{2, 0});
  CHECK(seen == V{{900, "10"}});
}

TEST_CASE("replay: recorded swap fields are audited, never corrected") {
  fixture::Spec spec;
  spec.events = 80;
  spec.seed = 9;
  auto gen = fixture::generate(spec);
  auto it = std::find_if(gen.dataset.events.begin() + 10, gen.dataset.events.end(),
                         [](const PoolEvent& e) { return e.kind == EventKind::Swap; });
  REQUIRE(it != gen.dataset.events.end());
  it->liquidity_after = *it->liquidity_after + 1;
  const auto loose = replay(gen.dataset, spec.pool, fixture_config(spec));
  REQUIRE(loose.audit.size() == 1);
  CHECK(loose.audit[0].field == "liquidity_after");
  CHECK(loose.audit[0].coord == it->coord());
  CHECK(loose.audit[0].replayed == (*it->liquidity_after - 1).str());
  CHECK_THROWS_AS(replay(gen.dataset, spec.pool, fixture_config(spec), ReplayOptions{std::nullopt, 0, true}),
                  ReplayError);

  auto mint = std::find_if(gen.dataset.events.begin() + 2, gen.dataset.events.end(),
                           [](const PoolEvent& e) { return e.kind == EventKind::Mint; });
  REQUIRE(mint != gen.dataset.events.end());
  *mint->amount0 += 1;
  CHECK(replay(gen.dataset, spec.pool, fixture_config(spec)).audit.size() == 2);
}

TEST_CASE("registry parsing") {
  const auto reg = parse_registry(nlohmann::json::parse(R"({"chain":"ethereum","entries":[
      {"address":"0xE592427A0AEce92De3Edee1F18E0157C05861564","label":"interface","note":"router"},
      {"address":"0x1111111254eeb25477b68fb85ed929f73a960582","label":"aggregator","note":""}]})"));
  CHECK(reg.entries.size() == 2);
  CHECK(reg.contains("0xe592427a0aece92de3edee1f18e0157c05861564"));
  CHECK(reg.contains("0xE592427A0AECE92DE3EDEE1F18E0157C05861564"));
  CHECK(reg.entries.at("0x1111111254eeb25477b68fb85ed929f73a960582").label == RouterLabel::Aggregator);
  CHECK_THROWS_AS(parse_registry(nlohmann::json::parse(R"({"chain":"e","entries":[
      {"address":"0x1111111254eeb25477b68fb85ed929f73a960582","label":"interface"},
      {"address":"0x1111111254EEB25477B68FB85ED929F73A960582","label":"interface"}]})")),
                  IngestError);
  CHECK_THROWS_AS(parse_registry(nlohmann::json::parse(
                      R"({"chain":"e","entries":[{"address":"0x1111111254eeb25477b68fb85ed929f73a960582","label":"x"}]})")),
                  IngestError);
  CHECK_THROWS_AS(parse_registry(nlohmann::json::parse(R"({"chain":"e","entries":[{"address":"0x12","label":"interface"}]})")),
                  IngestError);
  CHECK_THROWS_AS(parse_registry(nlohmann::json::parse(R"({"entries":[]})")), IngestError);
}

TEST_CASE("segment_flow") {
  fixture::Spec spec;
  spec.events = 500;
  spec.chain = "ethereum";
  const auto ds = fixture::generate(spec).dataset;
  const std::size_t swaps = static_cast<std::size_t>(
      std::count_if(ds.events.begin(), ds.events.end(), [](const PoolEvent& e) { return e.kind == EventKind::Swap; }));

  RouterRegistry empty{"ethereum", {}};
  const auto none = segment_flow(ds, empty);
  CHECK(none.retail == 0);
  CHECK(none.arbitrage == swaps);

  RouterRegistry all{"ethereum", {}};
  for (const auto& e : ds.events) {
    if (e.kind == EventKind::Swap && !all.contains(e.tx_to)) all.add(e.tx_to, {});
  }
  CHECK(segment_flow(ds, all).retail == swaps);

  RouterRegistry mixed{"ethereum", {}};
  mixed.add(fixture::routers()[0], {RouterLabel::Interface, ""});
  mixed.add(fixture::routers()[1], {RouterLabel::Aggregator, ""});
  const auto seg = segment_flow(ds, mixed);
  CHECK(seg.retail + seg.arbitrage == swaps);
  REQUIRE(seg.labels.size() == swaps);
  std::size_t k = 0;
  for (const auto& e : ds.events) {
    if (e.kind != EventKind::Swap) continue;
    const bool retail = e.tx_to == fixture::routers()[0] || e.tx_to == fixture::routers()[1];
    CHECK(seg.labels[k].tx_hash == e.tx_hash);
    CHECK(seg.labels[k].label == (retail ? Flow::Retail : Flow::Arbitrage));
    ++k;
  }
  CHECK(seg.retail > 0);
  CHECK(seg.arbitrage > 0);
  CHECK_THROWS_AS(segment_flow(ds, RouterRegistry{"optimism", {}}), DomainError);
}

TEST_CASE("aggregate_stats") {
  // token0: 6-decimal stablecoin at $1; token1: 18-decimal at $2000.
  const UsdPricer pricer(TokenPricing::fixed(6, 1.0), TokenPricing::fixed(18, 2000.0));
  ChainDataset ds;
  ds.events = {ev::swap(1, 0, 100, i256(100000000), i256(-1), "", 4.0)};
  auto s = aggregate_stats(ds, pricer);
  CHECK(s.swap_count == 1);
  CHECK(*s.median_swap_usd == Catch::Approx(100.0));
  CHECK(*s.median_gas_usd == 4.0);

  ds.events = {ev::swap(1, 0, 100, i256(10000000), i256(-1), "", 1.0),
               ev::swap(1, 1, 100, i256(-1), i256("10000000000000000"), "", 3.0)};
  s = aggregate_stats(ds, pricer);
  CHECK(*s.median_swap_usd == Catch::Approx(10.0));
  CHECK(s.volume_usd == Catch::Approx(30.0));
  CHECK(*s.median_gas_usd == 1.0);

  // Gas falls back to the series in force at the swap time.
  ds.events = {ev::swap(1, 0, 150, i256(10000000), i256(-1))};
  ds.gas_series = {{100, 0.5, 2000}, {200, 0.7, 2000}};
  CHECK(*aggregate_stats(ds, pricer).median_gas_usd == 0.5);

  // Permutation of same-timestamp swaps leaves every statistic unchanged.
  std::mt19937_64 rng(1);
  ds.events.clear();
  ds.gas_series.clear();
  for (std::uint32_t i = 0; i < 50; ++i) {
    ds.events.push_back(ev::swap(1, i, 100, i256(rng() % 1000000000000ULL + 1), i256(-1), "", double(rng() % 100)));
  }
  const auto base = aggregate_stats(ds, pricer);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(ds.events.begin(), ds.events.end(), rng);
    const auto p = aggregate_stats(ds, pricer);
    CHECK(p.volume_usd == base.volume_usd);
    CHECK(p.median_swap_usd == base.median_swap_usd);
    CHECK(p.median_gas_usd == base.median_gas_usd);
  }

  const UsdPricer partial(TokenPricing::over_time(6, PriceSeries({{0, 1.0}, {120, 1.0}})), TokenPricing::fixed(18, 1));
  ds.events = {ev::swap(1, 0, 100, i256(1), i256(-1)), ev::swap(2, 0, 130, i256(1), i256(-1)),
               ev::swap(3, 0, 170, i256(1), i256(-1))};
  CHECK_THROWS_WITH(aggregate_stats(ds, partial), Catch::Matchers::ContainsSubstring("2 swaps in [130, 170]"));
}

TEST_CASE("position_lifecycle_stats") {
  using K = EventKind;
  ChainDataset ds;
  ds.events = {
      ev::position(K::Mint, 1, 0, 1000, "a", -60, 60, 10),
      ev::position(K::Burn, 1, 1, 1000, "a", -60, 60, 10),    // same block: holding 0, closes record
      ev::position(K::Mint, 2, 0, 2000, "a", -60, 60, 5),     // re-mint: new record
      ev::position(K::Mint, 3, 0, 3000, "b", 0, 60, 7),       // single spacing
      ev::position(K::Burn, 4, 0, 3600, "b", 0, 60, 0),       // zero burn ignored
      ev::position(K::Burn, 5, 0, 4000, "b", 0, 60, 3),       // first burn at 4000
      ev::position(K::Mint, 6, 0, 5000, "c", -600, 600, 9),   // never burned
      ev::position(K::Burn, 7, 0, 9000, "a", -60, 60, 2),     // second record first burn: 7000 s
      ev::position(K::Burn, 8, 0, 9500, "zz", -60, 60, 2),    // unseen position ignored
  };
  LifecycleOptions opts{60, false};
  auto s = position_lifecycle_stats(ds, opts);
  CHECK(s.positions_created == 4);
  CHECK(s.unique_lp_wallets == 3);
  // holding times {0, 7000, 1000}: lower median 1000
  CHECK(s.median_holding_seconds == 1000);
  CHECK(s.share_single_tick_spacing == Catch::Approx(0.25));

  opts.exclude_single_spacing = true;
  s = position_lifecycle_stats(ds, opts);
  CHECK(s.positions_created == 3);
  CHECK(s.unique_lp_wallets == 2);
  CHECK(s.median_holding_seconds == 0);  // {0, 7000}
  CHECK(s.share_single_tick_spacing == Catch::Approx(0.25));

  const auto records = position_lifecycles(ds);
  REQUIRE(records.size() == 4);
  CHECK(records[0].closed);
  CHECK(records[0].holding_seconds() == 0);
  CHECK(!records[3].holding_seconds());
}

TEST_CASE("gas series parsing") {
  std::istringstream in("timestamp,gas_fee_usd,native_usd\n100,0.28,2000.5\n200,0.3,2001\n");
  const auto g = read_gas_series(in, "gas.csv");
  REQUIRE(g.size() == 2);
  CHECK(g[1].native_usd == 2001);
  std::ostringstream out;
  write_gas_series(out, g);
  CHECK(out.str() == "timestamp,gas_fee_usd,native_usd\n100,0.28,2000.5\n200,0.3,2001\n");
  std::istringstream bad("timestamp,gas_fee_usd,native_usd\n200,1,1\n100,1,1\n");
  CHECK_THROWS_WITH(read_gas_series(bad, "gas.csv"), Catch::Matchers::ContainsSubstring("gas.csv:3:"));
  const auto series = PriceSeries::native_from_gas(g);
  CHECK(*series.at(150) == 2000.5);
  CHECK(!series.at(99));
  CHECK(!series.at(201));
}
