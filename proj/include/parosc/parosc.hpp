#pragma once

#include "parosc/classical.hpp"
#include "parosc/errors.hpp"
#include "parosc/factorization.hpp"
#include "parosc/grid.hpp"
#include "parosc/int_polynomial.hpp"
#include "parosc/io.hpp"
#include "parosc/operators.hpp"
#include "parosc/oracle.hpp"
#include "parosc/profiles.hpp"
#include "parosc/specfun.hpp"
#include "parosc/states.hpp"
#include "parosc/verify.hpp"
