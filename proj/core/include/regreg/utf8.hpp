#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace regreg::utf8 {

struct Decoded {
  char32_t scalar;
  std::size_t length;  // bytes consumed
};

// Decodes one scalar at `pos`; nullopt on malformed input or surrogates.
std::optional<Decoded> decode_at(std::string_view text, std::size_t pos);

// Throws regreg::Error(InvalidArgument) on malformed input.
std::u32string decode(std::string_view text);

void append(std::string& out, char32_t scalar);
std::string encode(std::u32string_view scalars);

}  // namespace regreg::utf8
