#pragma once

#include "bp_osd_decoder.hpp"
#include "code_builder.hpp"
#include "code_io.hpp"
#include "code_search.hpp"
#include "depolarizing_channel.hpp"
#include "errors.hpp"
#include "gf2.hpp"
#include "margulis_generators.hpp"
#include "mc_simulator.hpp"
#include "rng.hpp"
#include "sl2_group.hpp"
#include "tanner_metrics.hpp"
