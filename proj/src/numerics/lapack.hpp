#pragma once

#include <complex>
#define LAPACK_COMPLEX_CPP
#include <lapacke.h>
