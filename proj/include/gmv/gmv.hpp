#pragma once

#include "gmv/error.hpp"
#include "gmv/grid.hpp"
#include "gmv/fft.hpp"
#include "gmv/filter.hpp"
#include "gmv/signal.hpp"
#include "gmv/imeasures.hpp"
#include "gmv/gof_anderson.hpp"
#include "gmv/gof_tf.hpp"
#include "gmv/source.hpp"
#include "gmv/earthmodel.hpp"
#include "gmv/ensemble.hpp"
#include "gmv/io.hpp"
#include "gmv/report.hpp"
#include "gmv/cli.hpp"
