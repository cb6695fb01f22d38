#pragma once

#include "biaslin/bits.hpp"
#include "biaslin/cube.hpp"
#include "biaslin/distributions.hpp"
#include "biaslin/error.hpp"
#include "biaslin/hermite.hpp"
#include "biaslin/io.hpp"
#include "biaslin/lintest.hpp"
#include "biaslin/polyalg.hpp"
#include "biaslin/random.hpp"
#include "biaslin/rational.hpp"
#include "biaslin/witness.hpp"
