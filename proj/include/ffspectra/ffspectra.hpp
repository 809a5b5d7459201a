#pragma once

#include "ffspectra/error.hpp"
#include "ffspectra/field.hpp"
#include "ffspectra/linalg.hpp"
#include "ffspectra/parallel.hpp"
#include "ffspectra/solvers.hpp"
#include "ffspectra/spectra.hpp"
#include "ffspectra/closed_forms.hpp"
#include "ffspectra/expr.hpp"
#include "ffspectra/io.hpp"
