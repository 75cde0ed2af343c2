#ifndef ENTEST_ENTEST_HPP
#define ENTEST_ENTEST_HPP

#include "entest/core.hpp"
#include "entest/datagen.hpp"
#include "entest/diagnostics.hpp"
#include "entest/linalg.hpp"
#include "entest/matrix.hpp"
#include "entest/oracle.hpp"
#include "entest/random.hpp"
#include "entest/trimmed_mean.hpp"
#include "entest/trimmed_regression.hpp"

#endif  // ENTEST_ENTEST_HPP
