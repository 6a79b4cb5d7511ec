#include "counter.hpp"

int main() {
    reset_counter();
    bump(10);
    bump(40);
    bump(55);
    return counter_value() == 105 ? 0 : 1;
}
