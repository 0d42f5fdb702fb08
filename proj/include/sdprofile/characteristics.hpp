#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace sdprofile {

// The four socio-demographic characteristics of a member profile.
enum class Characteristic { age, education, gender, sphere };

inline constexpr std::array<Characteristic, 4> kCharacteristics{
    Characteristic::age, Characteristic::education, Characteristic::gender, Characteristic::sphere};

constexpr std::size_t index_of(Characteristic c) { return static_cast<std::size_t>(c); }

// Every characteristic is binary; a Pole names one of its two values and so
// also identifies the characteristic it belongs to.
enum class Pole {
    teenager,  // 6 to 17 years old
    adult,     // 18+
    educated,
    nonliterate,
    man,
    woman,
    technical,
    humanitarian,
};

constexpr Characteristic characteristic_of(Pole p) {
    return static_cast<Characteristic>(static_cast<int>(p) / 2);
}

// Poles in declaration order: {first, second}.
constexpr std::array<Pole, 2> poles_of(Characteristic c) {
    const int base = static_cast<int>(c) * 2;
    return {static_cast<Pole>(base), static_cast<Pole>(base + 1)};
}

// 0 or 1: position of the pole inside poles_of(characteristic_of(p)).
constexpr std::size_t pole_slot(Pole p) { return static_cast<std::size_t>(p) % 2; }

constexpr Pole opposite(Pole p) { return static_cast<Pole>(static_cast<int>(p) ^ 1); }

std::string_view to_string(Characteristic c);
std::string_view to_string(Pole p);

std::optional<Characteristic> characteristic_from_string(std::string_view s);
// Only poles belonging to `c` are accepted.
std::optional<Pole> pole_from_string(Characteristic c, std::string_view s);

}  // namespace sdprofile
