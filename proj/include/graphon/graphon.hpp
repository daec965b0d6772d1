#pragma once

// Umbrella header.

#include "graphon/completion.hpp"
#include "graphon/core.hpp"
#include "graphon/cutmetric.hpp"
#include "graphon/error.hpp"
#include "graphon/estimation.hpp"
#include "graphon/io.hpp"
#include "graphon/kernels.hpp"
#include "graphon/rng.hpp"
#include "graphon/samplers.hpp"
