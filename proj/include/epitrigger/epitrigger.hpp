#pragma once

#include "errors.hpp"
#include "integrator.hpp"
#include "io.hpp"
#include "model.hpp"
#include "scenario.hpp"
#include "surveillance.hpp"
#include "sweep.hpp"
