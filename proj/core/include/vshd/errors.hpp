#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vshd {

/// Requested speed cannot be produced by the OV function for the given parameters.
class OutOfRange : public std::domain_error {
public:
	using std::domain_error::domain_error;
};

/// |G(jw)|^2 denominator vanished: a pole sits on the imaginary axis.
class Degenerate : public std::domain_error {
public:
	using std::domain_error::domain_error;
};

class InvalidConfig : public std::invalid_argument {
public:
	InvalidConfig(std::string key, const std::string& what)
		: std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

	const std::string& key() const noexcept { return key_; }

private:
	std::string key_;
};

class CollisionDetected : public std::runtime_error {
public:
	CollisionDetected(std::size_t index, double t);

	/// Index of the follower whose headway reached zero.
	std::size_t index() const noexcept { return index_; }
	double time() const noexcept { return time_; }

private:
	std::size_t index_;
	double time_;
};

class EmptyWindow : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

class IoFailure : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class SpecMismatch : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

}  // namespace vshd
