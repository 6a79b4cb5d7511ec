#include "mod.hpp"

int mod3(int value) {
    return value % 3;
}
