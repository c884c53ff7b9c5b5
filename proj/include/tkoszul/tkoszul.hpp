#pragma once

#include "rational.hpp"
#include "coeff.hpp"
#include "chart.hpp"
#include "koszul.hpp"
#include "homotopy.hpp"
#include "atlas.hpp"
#include "fixtures.hpp"
#include "random.hpp"
#include "report.hpp"
#include "cech.hpp"
#include "sampling.hpp"
#include "twist.hpp"
#include "barhkr.hpp"
#include "tor.hpp"
#include "jetcoh.hpp"
#include "suites.hpp"
