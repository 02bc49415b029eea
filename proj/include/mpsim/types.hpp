// Core identifiers, token arithmetic and error plumbing shared by every module.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace mpsim {

using Tick = std::uint64_t;
using OrderId = std::uint64_t;
using AccountId = std::string;
using MinerId = std::string;
using CoordinatorId = std::string;
using ServiceTypeId = std::string;

// Thrown when replicated-state math goes wrong (overflow, broken conservation,
// illegal internal transitions). The CLI maps this to exit code 4.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& what)
      : std::runtime_error(what) {}
};

// Non-negative token quantity in base units. 1 display token = 10^6 base units.
// All arithmetic is checked; going negative or wrapping aborts the state machine.
class TokenAmount {
 public:
  static constexpr std::uint64_t kBasePerToken = 1'000'000;

  constexpr TokenAmount() = default;

  static constexpr TokenAmount base(std::uint64_t v) { return TokenAmount(v); }

  static TokenAmount tokens(std::uint64_t t) {
    if (t > UINT64_MAX / kBasePerToken)
      throw InvariantViolation("token amount overflow");
    return TokenAmount(t * kBasePerToken);
  }

  constexpr std::uint64_t base_units() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  TokenAmount& operator+=(TokenAmount rhs) {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(value_, rhs.value_, &out))
      throw InvariantViolation("token amount overflow");
    value_ = out;
    return *this;
  }

  TokenAmount& operator-=(TokenAmount rhs) {
    if (rhs.value_ > value_)
      throw InvariantViolation("token amount underflow");
    value_ -= rhs.value_;
    return *this;
  }

  friend TokenAmount operator+(TokenAmount a, TokenAmount b) { return a += b; }
  friend TokenAmount operator-(TokenAmount a, TokenAmount b) { return a -= b; }
  friend constexpr bool operator==(TokenAmount a, TokenAmount b) { return a.value_ == b.value_; }
  friend constexpr bool operator!=(TokenAmount a, TokenAmount b) { return a.value_ != b.value_; }
  friend constexpr bool operator<(TokenAmount a, TokenAmount b) { return a.value_ < b.value_; }
  friend constexpr bool operator<=(TokenAmount a, TokenAmount b) { return a.value_ <= b.value_; }
  friend constexpr bool operator>(TokenAmount a, TokenAmount b) { return a.value_ > b.value_; }
  friend constexpr bool operator>=(TokenAmount a, TokenAmount b) { return a.value_ >= b.value_; }

 private:
  constexpr explicit TokenAmount(std::uint64_t v) : value_(v) {}
  std::uint64_t value_ = 0;
};

enum class AssetTag : std::uint8_t { Native, External };

struct AssetKind {
  AssetTag tag = AssetTag::Native;
  std::string symbol;  // non-empty iff External

  static AssetKind native() { return {AssetTag::Native, {}}; }
  static AssetKind external(std::string sym) {
    return {AssetTag::External, std::move(sym)};
  }
  bool is_native() const { return tag == AssetTag::Native; }
  friend bool operator==(const AssetKind& a, const AssetKind& b) {
    return a.tag == b.tag && a.symbol == b.symbol;
  }
};

enum class Rating : std::uint8_t { Good, Fair, Bad };

enum class Err : std::uint8_t {
  None = 0,
  // ledger
  ZeroStake,
  PassAlreadyActive,
  NoActivePass,
  InFlightOrders,
  InvalidServicePass,
  InsufficientAllowance,
  InsufficientBalance,
  UnknownServiceType,
  ZeroPrice,
  OrderNotFound,
  AlreadyAllocated,
  MinerUnavailable,
  NotAllocated,
  BadSignature,
  AlreadyCompleted,
  OrderExpired,
  NoCompletedService,
  ClientRestricted,
  ClientFrozen,
  CollateralTooLow,
  AlreadyRegistered,
  UnknownMiner,
  InFlightWork,
  // scheduler
  EmptyBatch,
  IllegalTransition,
  // actors
  NotAllocatedToMe,
  NotExecuted,
  // selection
  EmptyInput,
  NoEligibleMiners,
  ZeroTotalReputation,
  // coordination
  HeightGap,
  NotAMember,
  DuplicateSignature,
  // economics
  NotCompleted,
  NotCharged,
  EmptyListing,
  // simulation / cli
  ConfigInvalid,
  ShapeMismatch,
};

const char* err_name(Err e);

// Minimal success-or-error carrier for ledger operations. The error set is
// closed (Err), so no dynamic error payloads are needed.
template <typename T>
class Result {
 public:
  Result(T value) : value_(std::move(value)), err_(Err::None) {}
  Result(Err e) : err_(e) {}

  bool ok() const { return err_ == Err::None; }
  explicit operator bool() const { return ok(); }
  Err error() const { return err_; }

  T& value() {
    if (!ok()) throw InvariantViolation(std::string("Result::value on error ") + err_name(err_));
    return *value_;
  }
  const T& value() const {
    if (!ok()) throw InvariantViolation(std::string("Result::value on error ") + err_name(err_));
    return *value_;
  }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::optional<T> value_;
  Err err_;
};

class Status {
 public:
  Status() : err_(Err::None) {}
  Status(Err e) : err_(e) {}
  static Status ok_status() { return Status(); }

  bool ok() const { return err_ == Err::None; }
  explicit operator bool() const { return ok(); }
  Err error() const { return err_; }

 private:
  Err err_;
};

}  // namespace mpsim
