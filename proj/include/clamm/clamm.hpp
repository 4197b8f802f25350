#pragma once

#include "clamm/fixmath/fee_tiers.hpp"
#include "clamm/fixmath/full_math.hpp"
#include "clamm/fixmath/sqrt_price_math.hpp"
#include "clamm/fixmath/swap_math.hpp"
#include "clamm/fixmath/tick_math.hpp"
#include "clamm/fixmath/types.hpp"

#include "clamm/pool/pool_state.hpp"
#include "clamm/pool/snapshot.hpp"

#include "clamm/ingest/event.hpp"
#include "clamm/ingest/event_csv.hpp"
#include "clamm/ingest/flow.hpp"
#include "clamm/ingest/pricing.hpp"
#include "clamm/ingest/registry.hpp"
#include "clamm/ingest/replay.hpp"
#include "clamm/ingest/stats.hpp"

#include "clamm/analytics/breakeven.hpp"
#include "clamm/analytics/concentration.hpp"
#include "clamm/analytics/fee_returns.hpp"
#include "clamm/analytics/quote.hpp"
#include "clamm/analytics/trade_size.hpp"

#include "clamm/sim/blocktime.hpp"

#include "clamm/report/tables.hpp"
