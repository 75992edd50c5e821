#include <vshd/format.hpp>

#include <array>
#include <charconv>
#include <cmath>

namespace vshd::io {

std::string format_number(double value) {
	if (value == 0.0) return "0";  // folds -0
	std::array<char, 32> buf{};
	const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
	return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double value, int decimals) {
	std::array<char, 64> buf{};
	auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
	std::string out(buf.data(), res.ptr);
	if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
	return out;
}

bool parse_number(std::string_view text, double& out) {
	while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
	while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
	if (!text.empty() && text.front() == '+') text.remove_prefix(1);
	if (text.empty()) return false;
	const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
	return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

}  // namespace vshd::io
