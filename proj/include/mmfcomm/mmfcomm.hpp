#pragma once

#include "mmfcomm/bank_io.hpp"
#include "mmfcomm/channel.hpp"
#include "mmfcomm/codec.hpp"
#include "mmfcomm/correlation.hpp"
#include "mmfcomm/error.hpp"
#include "mmfcomm/harness/config.hpp"
#include "mmfcomm/harness/experiments.hpp"
#include "mmfcomm/harness/parallel.hpp"
#include "mmfcomm/harness/table.hpp"
#include "mmfcomm/modulation.hpp"
#include "mmfcomm/random.hpp"
#include "mmfcomm/semantic.hpp"
#include "mmfcomm/semantic_io.hpp"
#include "mmfcomm/sentiment.hpp"
#include "mmfcomm/sentiment_io.hpp"
