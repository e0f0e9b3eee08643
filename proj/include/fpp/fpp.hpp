#pragma once

#include "fpp/raster.hpp"
#include "fpp/io.hpp"
#include "fpp/demod.hpp"
#include "fpp/synth.hpp"
#include "fpp/spatial.hpp"
#include "fpp/temporal.hpp"
#include "fpp/metrics.hpp"
#include "fpp/config.hpp"
#include "fpp/pipeline.hpp"
