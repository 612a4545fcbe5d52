#pragma once

#include "sponsored/analysis.hpp"
#include "sponsored/direct.hpp"
#include "sponsored/errors.hpp"
#include "sponsored/generators.hpp"
#include "sponsored/io.hpp"
#include "sponsored/model.hpp"
#include "sponsored/modular.hpp"
#include "sponsored/rational.hpp"
#include "sponsored/report.hpp"
#include "sponsored/ties.hpp"
