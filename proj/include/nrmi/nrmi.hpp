#pragma once

#include "nrmi/codec.hpp"
#include "nrmi/datasets.hpp"
#include "nrmi/distort.hpp"
#include "nrmi/errors.hpp"
#include "nrmi/format.hpp"
#include "nrmi/gaussmath.hpp"
#include "nrmi/image.hpp"
#include "nrmi/metric.hpp"
#include "nrmi/stats.hpp"
