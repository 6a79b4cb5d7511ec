#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "labels.hpp"

TEST_CASE("testLabelScale") {
    std::string label = make_label(std::nullopt, "rdf", "li", "one");
    int bucket = scale_bucket(2.0);
    CHECK(label == "rdf:li=one");
    CHECK(bucket == 1);
}
