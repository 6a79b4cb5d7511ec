#include "counter.hpp"

namespace {
int counter = 0;
}

void reset_counter() {
    counter = 0;
}

int bump(int delta) {
    counter += delta;
    return counter;
}

int counter_value() {
    return counter;
}
