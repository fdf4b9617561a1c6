#pragma once

// Umbrella header.
#include "foresight/config.hpp"
#include "foresight/error.hpp"
#include "foresight/grid.hpp"
#include "foresight/ledger.hpp"
#include "foresight/lemma_suite.hpp"
#include "foresight/lemmas.hpp"
#include "foresight/model.hpp"
#include "foresight/pipeline.hpp"
#include "foresight/propfv.hpp"
#include "foresight/quadvar.hpp"
#include "foresight/rng.hpp"
#include "foresight/stieltjes.hpp"
#include "foresight/strategy.hpp"
