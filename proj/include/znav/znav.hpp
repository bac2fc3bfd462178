#pragma once

#include "errors.hpp"
#include "linalg.hpp"
#include "wirtinger.hpp"
#include "expr.hpp"
#include "navigation.hpp"
#include "path.hpp"
#include "finsler.hpp"
#include "spray.hpp"
#include "geodesic.hpp"
#include "sampling.hpp"
#include "classification.hpp"
#include "scenarios.hpp"
#include "verify.hpp"
#include "scenario_file.hpp"
