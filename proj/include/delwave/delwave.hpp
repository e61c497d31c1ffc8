#pragma once

#include "delwave/errors.hpp"
#include "delwave/exppoly.hpp"
#include "delwave/green.hpp"
#include "delwave/grid_function.hpp"
#include "delwave/io.hpp"
#include "delwave/models.hpp"
#include "delwave/parallel.hpp"
#include "delwave/perron.hpp"
#include "delwave/simulate.hpp"
#include "delwave/waves.hpp"
