#pragma once

#include "minuet/clustering.hpp"
#include "minuet/dca_onehop.hpp"
#include "minuet/engine.hpp"
#include "minuet/errors.hpp"
#include "minuet/event_log.hpp"
#include "minuet/metrics.hpp"
#include "minuet/minuet.hpp"
#include "minuet/mobility.hpp"
#include "minuet/model.hpp"
#include "minuet/pctt_multihop.hpp"
#include "minuet/radio.hpp"
#include "minuet/rng.hpp"
#include "minuet/scenario.hpp"
#include "minuet/techniques.hpp"
#include "minuet/time.hpp"
#include "minuet/version.hpp"
