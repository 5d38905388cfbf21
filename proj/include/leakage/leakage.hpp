// leakage.hpp: Umbrella include for the whole library.

#pragma once

#include "leakage/error.hpp"
#include "leakage/operator_core.hpp"
#include "leakage/spectral_partition.hpp"
#include "leakage/bounds.hpp"
#include "leakage/bloch_solver.hpp"
#include "leakage/schrieffer_wolff.hpp"
#include "leakage/dynamics.hpp"
#include "leakage/models.hpp"
#include "leakage/invariants.hpp"
#include "leakage/serialization.hpp"
#include "leakage/experiment.hpp"
