#include <doctest.h>

#include "rdlab/att.hpp"

using namespace rdlab;

TEST_CASE("ATT insert, update and replacement") {
  AggressorTrackingTable att(2);
  CHECK(att.update(10, 3));
  CHECK(att.update(20, 5));
  CHECK(att.size() == 2);
  CHECK_FALSE(att.update(30, 3));
  CHECK_FALSE(att.contains(30));
  CHECK(att.update(30, 4));
  CHECK_FALSE(att.contains(10));
  CHECK(att.count_of(30) == 4u);
  CHECK(att.update(20, 6));
  CHECK(att.count_of(20) == 6u);
}

TEST_CASE("ATT max picks the lowest row on ties") {
  AggressorTrackingTable att(4);
  att.update(40, 7, 100);
  att.update(12, 7, 200);
  att.update(5, 2, 300);
  REQUIRE(att.max_entry().has_value());
  CHECK(att.max_entry()->row == 12);
  CHECK(att.max_entry_at_least(8) == std::nullopt);
  CHECK(att.max_entry_at_least(7)->row == 12);
  CHECK(att.any_at_least(7));
  CHECK(att.max_entry_since(250)->row == 5);
  CHECK(att.remove(12));
  CHECK(att.max_entry()->row == 40);
  att.clear();
  CHECK_FALSE(att.max_entry().has_value());
}
