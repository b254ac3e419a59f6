#pragma once

#include "primepoint/errors.hpp"
#include "primepoint/ingest.hpp"
#include "primepoint/oracle.hpp"
#include "primepoint/prime_engine.hpp"
#include "primepoint/solver.hpp"
