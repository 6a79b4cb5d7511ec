#include "codec.hpp"

namespace {

int parity(unsigned v) {
    int bits = 0;
    while (v) {
        bits ^= static_cast<int>(v & 1u);
        v >>= 1;
    }
    return bits;
}

}  // namespace

int encode(int value) {
    const unsigned shifted = static_cast<unsigned>(value) << 1;
    return static_cast<int>(shifted | static_cast<unsigned>(parity(static_cast<unsigned>(value))));
}

int decode(int code) {
    return static_cast<int>(static_cast<unsigned>(code) >> 1);
}

bool has_even_parity(int code) {
    return parity(static_cast<unsigned>(code)) == 0;
}
