#pragma once

// Umbrella header: the full library.

#include "dream/anchors.hpp"
#include "dream/dataset.hpp"
#include "dream/errors.hpp"
#include "dream/graph.hpp"
#include "dream/io.hpp"
#include "dream/matrix.hpp"
#include "dream/nn.hpp"
#include "dream/noise.hpp"
#include "dream/rng.hpp"
#include "dream/sweep.hpp"
#include "dream/synth.hpp"
#include "dream/trainer.hpp"
