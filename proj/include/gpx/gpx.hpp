#pragma once

#include "gpx/errors.hpp"
#include "gpx/special.hpp"
#include "gpx/process_model.hpp"
#include "gpx/regvar.hpp"
#include "gpx/audit.hpp"
#include "gpx/rearrangement.hpp"
#include "gpx/parallel.hpp"
#include "gpx/fft.hpp"
#include "gpx/gaussian_sampler.hpp"
#include "gpx/pickands.hpp"
#include "gpx/classifier.hpp"
#include "gpx/asymptotics.hpp"
#include "gpx/monte_carlo.hpp"
#include "gpx/json_io.hpp"
#include "gpx/report.hpp"
