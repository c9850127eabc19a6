#pragma once

#include "plankton/control.hpp"
#include "plankton/dynamics.hpp"
#include "plankton/equilibria.hpp"
#include "plankton/errors.hpp"
#include "plankton/model.hpp"
#include "plankton/nsbif.hpp"
#include "plankton/roots.hpp"
