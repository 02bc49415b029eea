#include "mpsim/types.hpp"

namespace mpsim {

const char* err_name(Err e) {
  switch (e) {
    case Err::None: return "None";
    case Err::ZeroStake: return "ZeroStake";
    case Err::PassAlreadyActive: return "PassAlreadyActive";
    case Err::NoActivePass: return "NoActivePass";
    case Err::InFlightOrders: return "InFlightOrders";
    case Err::InvalidServicePass: return "InvalidServicePass";
    case Err::InsufficientAllowance: return "InsufficientAllowance";
    case Err::InsufficientBalance: return "InsufficientBalance";
    case Err::UnknownServiceType: return "UnknownServiceType";
    case Err::ZeroPrice: return "ZeroPrice";
    case Err::OrderNotFound: return "OrderNotFound";
    case Err::AlreadyAllocated: return "AlreadyAllocated";
    case Err::MinerUnavailable: return "MinerUnavailable";
    case Err::NotAllocated: return "NotAllocated";
    case Err::BadSignature: return "BadSignature";
    case Err::AlreadyCompleted: return "AlreadyCompleted";
    case Err::OrderExpired: return "OrderExpired";
    case Err::NoCompletedService: return "NoCompletedService";
    case Err::ClientRestricted: return "ClientRestricted";
    case Err::ClientFrozen: return "ClientFrozen";
    case Err::CollateralTooLow: return "CollateralTooLow";
    case Err::AlreadyRegistered: return "AlreadyRegistered";
    case Err::UnknownMiner: return "UnknownMiner";
    case Err::InFlightWork: return "InFlightWork";
    case Err::EmptyBatch: return "EmptyBatch";
    case Err::IllegalTransition: return "IllegalTransition";
    case Err::NotAllocatedToMe: return "NotAllocatedToMe";
    case Err::NotExecuted: return "NotExecuted";
    case Err::EmptyInput: return "EmptyInput";
    case Err::NoEligibleMiners: return "NoEligibleMiners";
    case Err::ZeroTotalReputation: return "ZeroTotalReputation";
    case Err::HeightGap: return "HeightGap";
    case Err::NotAMember: return "NotAMember";
    case Err::DuplicateSignature: return "DuplicateSignature";
    case Err::NotCompleted: return "NotCompleted";
    case Err::NotCharged: return "NotCharged";
    case Err::EmptyListing: return "EmptyListing";
    case Err::ConfigInvalid: return "ConfigInvalid";
    case Err::ShapeMismatch: return "ShapeMismatch";
  }
  return "Unknown";
}

}  // namespace mpsim
