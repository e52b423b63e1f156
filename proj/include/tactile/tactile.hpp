#pragma once

#include "tactile/cli.hpp"
#include "tactile/config.hpp"
#include "tactile/decoder.hpp"
#include "tactile/error.hpp"
#include "tactile/eval.hpp"
#include "tactile/features.hpp"
#include "tactile/fft.hpp"
#include "tactile/io.hpp"
#include "tactile/pipeline.hpp"
#include "tactile/random.hpp"
#include "tactile/recording.hpp"
#include "tactile/signal.hpp"
#include "tactile/stats.hpp"
#include "tactile/synth.hpp"
