#include "sdprofile/characteristics.hpp"

namespace sdprofile {
namespace {

constexpr std::array<std::string_view, 4> kCharacteristicNames{"age", "education", "gender", "sphere"};
constexpr std::array<std::string_view, 8> kPoleNames{"teenager", "adult",  "educated",  "nonliterate",
                                                     "man",      "woman",  "technical", "humanitarian"};

}  // namespace

std::string_view to_string(Characteristic c) { return kCharacteristicNames[index_of(c)]; }

std::string_view to_string(Pole p) { return kPoleNames[static_cast<std::size_t>(p)]; }

std::optional<Characteristic> characteristic_from_string(std::string_view s) {
    for (const auto c : kCharacteristics)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

std::optional<Pole> pole_from_string(Characteristic c, std::string_view s) {
    for (const auto p : poles_of(c))
        if (to_string(p) == s) return p;
    return std::nullopt;
}

}  // namespace sdprofile
