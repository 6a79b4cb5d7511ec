#include <bit>
#include <cstdint>

#include "labels.hpp"

int main() {
    make_label(std::nullopt, "pdf", "Version", "1.4");
    make_label(std::string("uri"), "nsSchem", "li", "two");
    make_label(std::nullopt, "rdf", "li", "two");
    make_label(std::string("x"), "p", "n", "v");
    make_label(std::nullopt, "dc", "title", "Report");
    make_label(std::string("uri"), "rdf", "li", "one");

    scale_bucket(2.5);
    scale_bucket(3.0);
    scale_bucket(3.999);
    scale_bucket(0.0);
    scale_bucket(-0.0);
    scale_bucket(1e300);
    scale_bucket(-7.25);
    scale_bucket(std::bit_cast<double>(std::uint64_t{0x7ff8000000000000ULL}));
    scale_bucket(std::bit_cast<double>(std::uint64_t{0x7ff8000000000dedULL}));
    scale_bucket(std::bit_cast<double>(std::uint64_t{0xfff0000000000000ULL}));
    return 0;
}
