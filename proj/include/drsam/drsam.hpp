#pragma once

#include "drsam/detector.hpp"
#include "drsam/error.hpp"
#include "drsam/eval.hpp"
#include "drsam/exact.hpp"
#include "drsam/ingest.hpp"
#include "drsam/mining.hpp"
#include "drsam/preprocess.hpp"
#include "drsam/random.hpp"
#include "drsam/rule_file.hpp"
#include "drsam/synth.hpp"
#include "drsam/trace.hpp"
