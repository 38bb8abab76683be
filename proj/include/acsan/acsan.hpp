#ifndef ACSAN_ACSAN_HPP
#define ACSAN_ACSAN_HPP

#include "acsan/error.hpp"
#include "acsan/terms.hpp"
#include "acsan/policy.hpp"
#include "acsan/fixpoint.hpp"
#include "acsan/transition.hpp"
#include "acsan/order.hpp"
#include "acsan/scenario.hpp"
#include "acsan/analysis.hpp"
#include "acsan/syntax.hpp"
#include "acsan/report.hpp"

#endif
