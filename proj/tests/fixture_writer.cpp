// Writes the sample data under data/fixtures. Output is deterministic; rerun after
// changing the generators and commit the result.

#include "clamm/ingest/event_csv.hpp"
#include "clamm/ingest/registry.hpp"
#include "clamm/pool/pool_state.hpp"
#include "support/breakeven_case.hpp"
#include "support/fixture_gen.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace clamm;
using namespace clamm::ingest;

namespace {

void write(const std::filesystem::path& dir, const std::string& name, const std::vector<PoolEvent>& events) {
  std::ofstream out(dir / name, std::ios::binary);
  write_events(out, events);
}

void write_gas(const std::filesystem::path& dir, const std::string& name, const std::vector<GasPoint>& gas) {
  std::ofstream out(dir / name, std::ios::binary);
  write_gas_series(out, gas);
}

PoolEvent base(const std::string& chain, const std::string& pool, EventKind kind, std::uint64_t block,
               std::uint32_t log, std::int64_t ts, int tx) {
  PoolEvent e;
  e.chain = chain;
  e.pool = pool;
  e.kind = kind;
  e.block_number = block;
  e.log_index = log;
  e.timestamp = ts;
  char h[80];
  std::snprintf(h, sizeof h, "0x%064x", tx);
  e.tx_hash = h;
  e.tx_to = fixture::position_manager();
  return e;
}

/// Initialize plus one mint, with amounts taken from the engine.
std::vector<PoolEvent> one_position(const std::string& chain, const std::string& pool, PoolConfig cfg,
                                    const SqrtPriceX96& price, Tick lo, Tick hi, const Liquidity& liq) {
  const std::int64_t ts = 1672531200;
  PoolState s(cfg);
  std::vector<PoolEvent> out;
  PoolEvent init = base(chain, pool, EventKind::Initialize, 16308190, 3, ts, 1);
  init.sqrt_price_x96 = price;
  init.tick_after = s.initialize(price);
  out.push_back(init);
  const auto amounts = s.mint(fixture::hex_address(0x1b, 1), lo, hi, liq);
  PoolEvent m = base(chain, pool, EventKind::Mint, 16308190, 4, ts, 1);
  m.owner = fixture::hex_address(0x1b, 1);
  m.tick_lower = lo;
  m.tick_upper = hi;
  m.liquidity_delta = liq;
  m.amount0 = i256(amounts.amount0);
  m.amount1 = i256(amounts.amount1);
  out.push_back(m);
  return out;
}

std::vector<PoolEvent> full_range_pool(const std::string& chain, const std::string& pool, double tvl_usd) {
  const PoolState s = bcase::pool(tvl_usd);
  const auto& [key, pos] = *s.positions().begin();
  return one_position(chain, pool, s.config(), s.sqrt_price(), pos.tick_lower, pos.tick_upper, pos.liquidity);
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data/fixtures";
  std::filesystem::create_directories(dir);

  // Every tick of the 200-tick window sits in the mid bucket of the only position.
  write(dir, "single_position.csv",
        one_position("arbitrum", fixture::hex_address(0x5, 1), PoolConfig{500, 10}, tick_to_sqrt_price(0), 0, 10,
                     Liquidity("1000000000000000000")));

  // USDC/WETH at $2000: a deep mainnet pool and a shallow rollup pool.
  write(dir, "deep_ethereum.csv", full_range_pool("ethereum", fixture::hex_address(0xe, 1), 3e8));
  write(dir, "shallow_arbitrum.csv", full_range_pool("arbitrum", fixture::hex_address(0xa, 1), 3e7));
  write_gas(dir, "gas_ethereum.csv", {{1672444800, 10.0, 2000.0}, {1672617600, 10.0, 2000.0}});
  write_gas(dir, "gas_arbitrum.csv", {{1672444800, 0.28, 2000.0}, {1672617600, 0.28, 2000.0}});

  // Random mints, burns and swaps on one pool, with router-tagged retail flow.
  fixture::Spec spec;
  spec.seed = 1;
  spec.events = 2000;
  const auto g = fixture::generate(spec);
  write(dir, "synthetic_arbitrum.csv", g.dataset.events);
  RouterRegistry reg;
  reg.chain = spec.chain;
  const RouterLabel labels[] = {RouterLabel::Interface, RouterLabel::Aggregator, RouterLabel::OtherRetail};
  for (std::size_t i = 0; i < fixture::routers().size(); ++i) reg.add(fixture::routers()[i], {labels[i], "router " + std::to_string(i + 1)});
  std::ofstream(dir / "routers_arbitrum.json", std::ios::binary) << registry_json(reg).dump(2) << '\n';
  std::vector<GasPoint> gas;
  const std::int64_t first = g.dataset.events.front().timestamp;
  const std::int64_t last = g.dataset.events.back().timestamp;
  for (std::int64_t t = first - first % 3600; t <= last + 3600; t += 3600) {
    gas.push_back({t, 0.2 + 0.01 * static_cast<double>((t / 3600) % 17), 1.0});
  }
  write_gas(dir, "gas_synthetic_arbitrum.csv", gas);
  std::cout << "wrote fixtures to " << dir << '\n';
  return 0;
}
