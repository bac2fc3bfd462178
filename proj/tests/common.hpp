#pragma once

#include <gtest/gtest.h>

#include "criteria.hpp"
#include "support.hpp"

namespace znav::test {

inline void expect_outcome(const criteria::Outcome& o) {
  EXPECT_FALSE(o.checks.empty());
  for (const auto& c : o.checks) EXPECT_TRUE(c.pass) << criteria::describe(c);
}

}  // namespace znav::test
