// models.hpp: Built-in example systems.

#pragma once

#include "leakage/models/chain.hpp"
#include "leakage/models/harmonic_chain.hpp"
#include "leakage/models/transmon.hpp"
