#pragma once

#include "cgdyn/channels.hpp"
#include "cgdyn/coarse_grain.hpp"
#include "cgdyn/diagnostics.hpp"
#include "cgdyn/evolve.hpp"
#include "cgdyn/experiment.hpp"
#include "cgdyn/hamiltonian.hpp"
#include "cgdyn/maxent.hpp"
#include "cgdyn/qcore.hpp"
#include "cgdyn/version.hpp"
