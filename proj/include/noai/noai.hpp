#pragma once

#include "noai/analysis.hpp"
#include "noai/engine.hpp"
#include "noai/error.hpp"
#include "noai/ingest.hpp"
#include "noai/model.hpp"
#include "noai/report.hpp"
#include "noai/synth.hpp"
