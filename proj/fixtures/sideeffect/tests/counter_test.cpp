#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "counter.hpp"

TEST_CASE("testCounterFlow") {
    reset_counter();
    bump(3);
    CHECK(bump(2) == 5);
    CHECK(counter_value() == 5);
}
