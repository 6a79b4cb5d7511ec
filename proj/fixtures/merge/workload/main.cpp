#include <initializer_list>

#include "mod.hpp"

int main() {
    int sink = 0;
    for (int v : {3, 4, 5, 6, 7, 12}) {
        sink += mod3(v);
    }
    return sink == 4 ? 0 : 1;
}
