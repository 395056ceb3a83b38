#pragma once

#include "mfhurst/csv.hpp"
#include "mfhurst/dates.hpp"
#include "mfhurst/errors.hpp"
#include "mfhurst/exports.hpp"
#include "mfhurst/fft.hpp"
#include "mfhurst/fitting.hpp"
#include "mfhurst/hurst_scaling.hpp"
#include "mfhurst/ingest.hpp"
#include "mfhurst/mfdfa.hpp"
#include "mfhurst/pipeline.hpp"
#include "mfhurst/rolling.hpp"
#include "mfhurst/series.hpp"
#include "mfhurst/spectrum.hpp"
#include "mfhurst/synth.hpp"
#include "mfhurst/transform.hpp"
#include "mfhurst/version.hpp"
