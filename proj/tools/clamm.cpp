// clamm: replay, analytics and block-time simulation from the command line.
//
// Exit codes: 0 success, 1 internal error, 2 usage or input error.

#include "clamm/clamm.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace clamm;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Relative input paths resolve against CLAMM_DATA_DIR when it is set.
fs::path resolve_input(const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("CLAMM_DATA_DIR"); dir && *dir) return fs::path(dir) / path;
  }
  return path;
}

ingest::EventCoord parse_coord(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--until expects BLOCK:LOG, got '" + s + "'");
  try {
    std::size_t used = 0;
    const auto block = std::stoull(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const auto log = std::stoul(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1) throw std::invalid_argument(s);
    return {block, static_cast<std::uint32_t>(log)};
  } catch (const std::logic_error&) {
    throw UsageError("--until expects BLOCK:LOG, got '" + s + "'");
  }
}

bool parse_direction(const std::string& d) {
  if (d == "0to1") return true;
  if (d == "1to0") return false;
  throw UsageError("--direction must be 0to1 or 1to0");
}

// ---------------------------------------------------------------- shared flags

struct PoolArgs {
  std::string events;
  std::string pool;
  std::uint32_t fee_tier{500};
  Tick tick_spacing{0};

  void add(CLI::App* c, const std::string& suffix = "") {
    c->add_option("--events" + suffix, events, "Event CSV/TSV file")->required();
    c->add_option("--pool" + suffix, pool, "Pool address")->required();
    c->add_option("--fee-tier" + suffix, fee_tier, "Fee tier in hundredths of a bip")->capture_default_str();
    c->add_option("--tick-spacing" + suffix, tick_spacing, "Tick spacing (default: from the fee tier)");
  }
  PoolConfig config() const {
    const Tick spacing = tick_spacing > 0 ? tick_spacing : FeeTierTable::defaults().spacing_for(fee_tier);
    return {fee_tier, spacing};
  }
  ingest::ChainDataset load() const { return ingest::load_dataset(resolve_input(events)); }
};

struct PricingArgs {
  int decimals0{18};
  int decimals1{18};
  std::optional<double> usd0;
  std::optional<double> usd1;
  bool usd0_from_gas{false};
  bool usd1_from_gas{false};

  void add(CLI::App* c) {
    c->add_option("--decimals0", decimals0, "Token0 decimals")->capture_default_str();
    c->add_option("--decimals1", decimals1, "Token1 decimals")->capture_default_str();
    auto* a = c->add_option("--usd0", usd0, "Token0 USD price");
    auto* b = c->add_option("--usd1", usd1, "Token1 USD price");
    c->add_flag("--usd0-from-gas", usd0_from_gas, "Price token0 with the gas series native_usd column")->excludes(a);
    c->add_flag("--usd1-from-gas", usd1_from_gas, "Price token1 with the gas series native_usd column")->excludes(b);
  }

  ingest::TokenPricing token(int decimals, const std::optional<double>& usd, bool from_gas,
                             const std::vector<ingest::GasPoint>& gas, const char* name) const {
    if (usd) return ingest::TokenPricing::fixed(decimals, *usd);
    if (from_gas) {
      if (gas.empty()) throw UsageError(std::string("--") + name + "-from-gas needs a gas series");
      return ingest::TokenPricing::over_time(decimals, ingest::PriceSeries::native_from_gas(gas));
    }
    throw UsageError(std::string("no USD price for token: pass --") + name + " or --" + name + "-from-gas");
  }
  ingest::UsdPricer pricer(const std::vector<ingest::GasPoint>& gas) const {
    return {token(decimals0, usd0, usd0_from_gas, gas, "usd0"), token(decimals1, usd1, usd1_from_gas, gas, "usd1")};
  }
};

// ---------------------------------------------------------------- output

/// Writes tables either into an output directory (with a run manifest) or to stdout.
class Output {
 public:
  Output(std::string subcommand, const CLI::App* app) : subcommand_(std::move(subcommand)), app_(app) {}

  void set_dir(const std::string& dir) {
    if (dir.empty()) return;
    dir_ = fs::path(dir);
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec || !fs::is_directory(*dir_)) throw UsageError("cannot create output directory " + dir);
  }
  bool to_dir() const { return dir_.has_value(); }

  void input(const std::string& path) { inputs_.push_back(resolve_input(path).string()); }

  void file(const std::string& name, const std::string& content) {
    const fs::path p = *dir_ / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw UsageError("cannot write " + p.string());
    outputs_.push_back(p.string());
  }

  /// Table to a file, or to stdout when printing.
  void table(const std::string& name, const std::string& csv, bool print) {
    if (to_dir()) file(name, csv);
    else if (print) std::cout << csv;
  }
  void summary(const std::string& name, const json& j, bool print) {
    if (to_dir()) file(name, j.dump(2) + "\n");
    else if (print) std::cout << j.dump(2) << '\n';
  }

  void finish() {
    if (!to_dir()) return;
    json config = json::object();
    for (const CLI::Option* opt : app_->get_options()) {
      if (opt->get_name() == "--help" || opt->get_name() == "--out") continue;
      if (opt->count() == 0 && opt->get_default_str().empty()) continue;
      const auto r = opt->count() ? opt->reduced_results() : std::vector<std::string>{opt->get_default_str()};
      config[opt->get_name()] = r.size() == 1 ? json(r.front()) : json(r);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path p = *dir_ / "manifest.json";
    json m{{"subcommand", subcommand_},
           {"inputs", inputs_},
           {"config", config},
           {"config_hash", sha256_hex(config.dump())},
           {"tool_version", kToolVersion},
           {"outputs", outputs_},
           {"wall_time_seconds", wall}};
    std::ofstream out(p, std::ios::binary);
    out << m.dump(2) << '\n';
    if (!out) throw UsageError("cannot write " + p.string());
  }

 private:
  std::string subcommand_;
  const CLI::App* app_;
  std::optional<fs::path> dir_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_{std::chrono::steady_clock::now()};
};

// ---------------------------------------------------------------- replay

struct ReplayArgs {
  PoolArgs pool;
  std::int64_t every{900};
  std::string until;
  bool allow_mismatch{false};
  std::string out;
};

int run_replay(const ReplayArgs& a, const CLI::App* app) {
  ingest::ReplayOptions opts;
  opts.snapshot_every = a.every;
  opts.strict = !a.allow_mismatch;
  if (!a.until.empty()) opts.until = parse_coord(a.until);
  if (a.every < 0) throw UsageError("--snapshot-every must be non-negative");
  const auto ds = a.pool.load();
  Output o("replay", app);
  o.set_dir(a.out);
  o.input(a.pool.events);

  std::string snapshots = report::snapshots_header();
  const auto r = ingest::replay(ds, a.pool.pool, a.pool.config(), opts,
                                [&](std::int64_t t, const PoolState& s) { snapshots += report::snapshot_row(t, s); });
  const std::string hash = state_hash(r.state);
  o.file("snapshots.csv", snapshots);
  o.file("final_state.json", canonical_snapshot(r.state));
  o.file("state_hash.txt", hash + "\n");
  o.file("audit.csv", report::audit_csv(r.audit));
  o.finish();
  std::cout << hash << '\n';
  if (!r.audit.empty()) std::cerr << "clamm: " << r.audit.size() << " audit mismatches recorded in audit.csv\n";
  return 0;
}

// ---------------------------------------------------------------- analyze

struct ConcentrationArgs {
  PoolArgs pool;
  std::int64_t every{86400};
  int window_bps{analytics::kDefaultWindowBps};
  int bucket_bps{analytics::kDefaultBucketBps};
  std::string until;
  bool summary{false};
  bool profile{false};
  std::string out;
};

int run_concentration(const ConcentrationArgs& a, const CLI::App* app) {
  Output o("analyze concentration", app);
  o.set_dir(a.out);
  o.input(a.pool.events);
  const auto ds = a.pool.load();
  std::optional<ingest::EventCoord> until;
  if (!a.until.empty()) until = parse_coord(a.until);
  const auto samples = report::sample_states(ds, a.pool.pool, a.pool.config(), a.every, until);
  if (samples.empty()) throw UsageError("no samples: the replay covers no grid time");
  const auto series = report::concentration_series(samples, a.window_bps, a.bucket_bps);
  o.table("concentration.csv", report::concentration_csv(series), !a.summary && !a.profile);
  o.table("profile.csv", report::profile_csv(series.back()), a.profile);
  o.summary("concentration_summary.json", report::concentration_summary(series), a.summary);
  o.finish();
  return 0;
}

struct BreakevenArgs {
  PoolArgs a;
  PoolArgs b;
  std::optional<double> gas_a;
  std::optional<double> gas_b;
  std::string gas_series_a;
  std::string gas_series_b;
  std::string direction{"0to1"};
  std::int64_t every{0};
  PricingArgs pricing;
  analytics::BreakevenOptions opts;
  bool summary{false};
  std::string out;
};

report::GasSource gas_source(const std::optional<double>& constant, const std::string& series, Output& o,
                             const char* side) {
  report::GasSource g;
  if (constant) {
    g.constant = constant;
  } else if (!series.empty()) {
    o.input(series);
    g.series = ingest::load_gas_series(resolve_input(series));
  } else {
    throw UsageError(std::string("venue ") + side + " needs --gas-" + side + " or --gas-series-" + side);
  }
  return g;
}

int run_breakeven(const BreakevenArgs& a, const CLI::App* app) {
  Output o("analyze breakeven", app);
  o.set_dir(a.out);
  o.input(a.a.events);
  o.input(a.b.events);
  const bool zfo = parse_direction(a.direction);
  const auto gas_a = gas_source(a.gas_a, a.gas_series_a, o, "a");
  const auto gas_b = gas_source(a.gas_b, a.gas_series_b, o, "b");
  const auto pricer = a.pricing.pricer(gas_a.series);
  const auto ds_a = a.a.load();
  const auto ds_b = a.b.load();
  auto sa = report::sample_states(ds_a, a.a.pool, a.a.config(), a.every);
  auto sb = report::sample_states(ds_b, a.b.pool, a.b.config(), a.every);
  if (a.every == 0 && !sa.empty() && !sb.empty()) {
    // Final states of both venues, compared at the later of the two last events.
    const std::int64_t t = std::max(sa.back().timestamp, sb.back().timestamp);
    sa = report::restamp(std::move(sa), t);
    sb = report::restamp(std::move(sb), t);
  }
  const auto s = report::breakeven_series(sa, ds_a.chain, gas_a, sb, ds_b.chain, gas_b, zfo, pricer, a.opts);
  o.table("breakeven.csv", report::breakeven_csv(s.points), !a.summary);
  o.summary("breakeven_summary.json", report::breakeven_summary(s), a.summary);
  o.finish();
  return 0;
}

struct FeesArgs {
  PoolArgs pool;
  std::string flow{"all"};
  std::string registry;
  bool summary{false};
  std::string out;
};

int run_fees(const FeesArgs& a, const CLI::App* app) {
  analytics::FlowFilter flow = analytics::FlowFilter::All;
  if (a.flow == "arb-only") flow = analytics::FlowFilter::ArbitrageOnly;
  else if (a.flow != "all") throw UsageError("--flow must be all or arb-only");
  if (flow == analytics::FlowFilter::ArbitrageOnly && a.registry.empty()) {
    throw UsageError("--flow arb-only requires --registry");
  }
  Output o("analyze fees", app);
  o.set_dir(a.out);
  o.input(a.pool.events);
  std::optional<ingest::RouterRegistry> reg;
  if (!a.registry.empty()) {
    o.input(a.registry);
    reg = ingest::load_registry(resolve_input(a.registry));
  }
  const auto ds = a.pool.load();
  const auto s = analytics::full_range_fee_returns(ds, a.pool.pool, a.pool.config(), flow, reg ? &*reg : nullptr);
  o.table("fee_returns.csv", report::fee_returns_csv(s), !a.summary);
  o.table("fee_audit.csv", report::audit_csv(s.audit), false);
  o.summary("fee_returns_summary.json", report::fee_returns_summary(s), a.summary);
  o.finish();
  return 0;
}

struct StatsArgs {
  std::string events;
  std::string pool;
  std::string gas_series;
  std::string registry;
  std::vector<double> thresholds;
  Tick tick_spacing{60};
  bool exclude_single{false};
  PricingArgs pricing;
  std::string out;
};

int run_stats(const StatsArgs& a, const CLI::App* app) {
  Output o("analyze stats", app);
  o.set_dir(a.out);
  o.input(a.events);
  auto ds = ingest::load_dataset(resolve_input(a.events));
  if (!a.pool.empty()) {
    const std::string p = ingest::lower(a.pool);
    std::erase_if(ds.events, [&](const ingest::PoolEvent& e) { return ingest::lower(e.pool) != p; });
    if (ds.events.empty()) throw UsageError("no events for pool " + p);
  }
  if (!a.gas_series.empty()) {
    o.input(a.gas_series);
    ds.gas_series = ingest::load_gas_series(resolve_input(a.gas_series));
  }
  std::optional<ingest::RouterRegistry> reg;
  if (!a.registry.empty()) {
    o.input(a.registry);
    reg = ingest::load_registry(resolve_input(a.registry));
  }
  if (!a.thresholds.empty() && !reg) throw UsageError("--threshold requires --registry");
  const auto pricer = a.pricing.pricer(ds.gas_series);
  ingest::LifecycleOptions lo;
  lo.tick_spacing = a.tick_spacing;
  lo.exclude_single_spacing = a.exclude_single;
  const auto r = report::stats_report(ds, pricer, lo, reg ? &*reg : nullptr, a.thresholds);
  o.table("stats.csv", report::stats_csv(r), true);
  o.finish();
  return 0;
}

// ---------------------------------------------------------------- quote

struct QuoteArgs {
  PoolArgs pool;
  std::string amount_in;
  std::string direction{"0to1"};
  std::string until;
  std::string out;
};

int run_quote(const QuoteArgs& a, const CLI::App* app) {
  const bool zfo = parse_direction(a.direction);
  if (a.amount_in.empty() || a.amount_in.find_first_not_of("0123456789") != std::string::npos ||
      a.amount_in.size() > 78) {
    throw UsageError("--amount-in must be a non-negative integer in raw token units");
  }
  u256 amount;
  try {
    amount = u256(a.amount_in);
  } catch (const std::exception&) {
    throw UsageError("--amount-in out of range");
  }
  Output o("quote", app);
  o.set_dir(a.out);
  o.input(a.pool.events);
  const auto ds = a.pool.load();
  ingest::ReplayOptions opts;
  if (!a.until.empty()) opts.until = parse_coord(a.until);
  const auto r = ingest::replay(ds, a.pool.pool, a.pool.config(), opts);
  o.table("quote.csv", report::quote_csv(analytics::quote(r.state, amount, zfo)), true);
  o.finish();
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  double sigma_annual{0.8};
  double gamma{0.0005};
  std::vector<double> taus{0.25, 1, 4, 16, 64};
  std::uint64_t paths{1000};
  std::uint64_t seed{1};
  double horizon{3600};
  double pool_value{1e6};
  double price0{2000};
  double fixed_cost{0};
  unsigned threads{0};
  bool summary{false};
  std::string out;
};

int run_simulate(const SimulateArgs& a, const CLI::App* app) {
  sim::SimConfig c;
  c.sigma = sim::sigma_from_annual(a.sigma_annual);
  c.gamma = a.gamma;
  c.paths = a.paths;
  c.seed = a.seed;
  c.horizon_seconds = a.horizon;
  c.pool_value_usd = a.pool_value;
  c.price0 = a.price0;
  c.fixed_cost_usd = a.fixed_cost;
  c.threads = a.threads;
  if (a.taus.empty()) throw UsageError("--tau-grid is empty");
  for (double t : a.taus) {
    c.tau = t;
    c.validate();
  }
  Output o("simulate", app);
  o.set_dir(a.out);
  const auto t = report::simulation_table(c, a.taus);
  o.table("simulation.csv", report::simulation_csv(t), !a.summary);
  o.summary("simulation_summary.json", report::simulation_summary(t), a.summary);
  o.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concentrated-liquidity pool replay, analytics and block-time simulation", "clamm"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "Replay pool events and write snapshots and the state hash");
  ra.pool.add(replay);
  replay->add_option("--snapshot-every", ra.every, "Snapshot grid in seconds (0: none)")->capture_default_str();
  replay->add_option("--until", ra.until, "Stop after event BLOCK:LOG");
  replay->add_flag("--allow-mismatch", ra.allow_mismatch, "Record audit mismatches instead of failing");
  replay->add_option("--out", ra.out, "Output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "Analytics tables");
  analyze->require_subcommand(1);

  ConcentrationArgs ca;
  auto* conc = analyze->add_subcommand("concentration", "Liquidity concentration around the current price");
  ca.pool.add(conc);
  conc->add_option("--every", ca.every, "Sampling grid in seconds (0: final state only)")->capture_default_str();
  conc->add_option("--window-bps", ca.window_bps, "Half-width of the window in ticks")->capture_default_str();
  conc->add_option("--bucket-bps", ca.bucket_bps, "Bucket width in ticks")->capture_default_str();
  conc->add_option("--until", ca.until, "Stop after event BLOCK:LOG");
  conc->add_flag("--summary", ca.summary, "Print the median summary instead of the table");
  conc->add_flag("--profile", ca.profile, "Print the bucket profile of the last sample");
  conc->add_option("--out", ca.out, "Output directory");

  BreakevenArgs ba;
  auto* be = analyze->add_subcommand("breakeven", "Trade size at which two venues give equal net output");
  ba.a.add(be, "-a");
  ba.b.add(be, "-b");
  auto* ga = be->add_option("--gas-a", ba.gas_a, "Gas per swap on venue a, USD");
  auto* gb = be->add_option("--gas-b", ba.gas_b, "Gas per swap on venue b, USD");
  be->add_option("--gas-series-a", ba.gas_series_a, "Gas series for venue a")->excludes(ga);
  be->add_option("--gas-series-b", ba.gas_series_b, "Gas series for venue b")->excludes(gb);
  be->add_option("--direction", ba.direction, "Swap direction, 0to1 or 1to0")->capture_default_str();
  be->add_option("--every", ba.every, "Sampling grid in seconds (0: final states)")->capture_default_str();
  be->add_option("--tol-usd", ba.opts.tol_usd, "Root tolerance")->capture_default_str();
  be->add_option("--min-usd", ba.opts.min_usd, "Smallest trade searched")->capture_default_str();
  be->add_option("--max-usd", ba.opts.max_usd, "Largest trade searched")->capture_default_str();
  ba.pricing.add(be);
  be->add_flag("--summary", ba.summary, "Print the summary instead of the table");
  be->add_option("--out", ba.out, "Output directory");

  FeesArgs fa;
  auto* fees = analyze->add_subcommand("fees", "Daily full-range fee returns");
  fa.pool.add(fees);
  fees->add_option("--flow", fa.flow, "all or arb-only")->capture_default_str();
  fees->add_option("--registry", fa.registry, "Router registry JSON");
  fees->add_flag("--summary", fa.summary, "Print the summary instead of the table");
  fees->add_option("--out", fa.out, "Output directory");

  StatsArgs sa;
  auto* stats = analyze->add_subcommand("stats", "Swap, gas and position statistics");
  stats->add_option("--events", sa.events, "Event CSV/TSV file")->required();
  stats->add_option("--pool", sa.pool, "Restrict to one pool");
  stats->add_option("--gas-series", sa.gas_series, "Gas series CSV");
  stats->add_option("--registry", sa.registry, "Router registry JSON");
  stats->add_option("--threshold", sa.thresholds, "Retail trade-size threshold in USD (repeatable)");
  stats->add_option("--tick-spacing", sa.tick_spacing, "Spacing for single-spacing positions")->capture_default_str();
  stats->add_flag("--exclude-single-spacing", sa.exclude_single, "Drop single-spacing positions from counts");
  sa.pricing.add(stats);
  stats->add_option("--out", sa.out, "Output directory");

  QuoteArgs qa;
  auto* quote = app.add_subcommand("quote", "Exact-input quote against the replayed state");
  qa.pool.add(quote);
  quote->add_option("--amount-in", qa.amount_in, "Raw input amount")->required();
  quote->add_option("--direction", qa.direction, "0to1 or 1to0")->capture_default_str();
  quote->add_option("--until", qa.until, "Quote after event BLOCK:LOG");
  quote->add_option("--out", qa.out, "Output directory");

  SimulateArgs ma;
  auto* simc = app.add_subcommand("simulate", "Arbitrage against a constant-product pool at discrete block times");
  simc->add_option("--sigma", ma.sigma_annual, "Annualised volatility")->capture_default_str();
  simc->add_option("--gamma", ma.gamma, "Pool fee")->capture_default_str();
  simc->add_option("--tau-grid", ma.taus, "Block times in seconds")->delimiter(',')->capture_default_str();
  simc->add_option("--paths", ma.paths, "Monte Carlo paths per block time")->capture_default_str();
  simc->add_option("--seed", ma.seed, "Random seed")->capture_default_str();
  simc->add_option("--horizon", ma.horizon, "Simulated seconds per path")->capture_default_str();
  simc->add_option("--pool-value", ma.pool_value, "Pool value in USD")->capture_default_str();
  simc->add_option("--price0", ma.price0, "Initial price")->capture_default_str();
  simc->add_option("--fixed-cost", ma.fixed_cost, "Arbitrageur cost per trade, USD")->capture_default_str();
  simc->add_option("--threads", ma.threads, "Worker threads (0: all cores)")->capture_default_str();
  simc->add_flag("--summary", ma.summary, "Print the scaling summary instead of the table");
  simc->add_option("--out", ma.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*replay) return run_replay(ra, replay);
    if (*conc) return run_concentration(ca, conc);
    if (*be) return run_breakeven(ba, be);
    if (*fees) return run_fees(fa, fees);
    if (*stats) return run_stats(sa, stats);
    if (*quote) return run_quote(qa, quote);
    if (*simc) return run_simulate(ma, simc);
  } catch (const UsageError& e) {
    std::cerr << "clamm: " << e.what() << '\n';
    return 2;
  } catch (const ingest::IngestError& e) {
    std::cerr << "clamm: " << e.what() << '\n';
    return 2;
  } catch (const ingest::ReplayError& e) {
    std::cerr << "clamm: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "clamm: " << e.what() << '\n';
    return 2;
  } catch (const StateError& e) {
    std::cerr << "clamm: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "clamm: internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
