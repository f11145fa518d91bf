#pragma once
// Event taxonomy shared by the consequence tracker and the metrics layer.

#include <cstdint>

namespace ssvf {

enum class FieldKind : std::uint8_t { Tag = 0, Data = 1 };

inline const char* field_name(FieldKind f) {
  return f == FieldKind::Tag ? "tag" : "data";
}

// ECC check result classes recorded on the first consuming access of a
// fault. Sdc classes split by field and by the data's ownership at access
// time; Due classes split by field only; correction pools everything.
enum class OutcomeClass : std::uint8_t {
  Dce = 0,
  DueTf,
  DueDf,
  SdcTfUd,
  SdcDfUd,
  SdcTfNud,
  SdcDfNud,
  Count_,
};

inline const char* outcome_name(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Dce: return "dce";
    case OutcomeClass::DueTf: return "due_tf";
    case OutcomeClass::DueDf: return "due_df";
    case OutcomeClass::SdcTfUd: return "sdc_tf_ud";
    case OutcomeClass::SdcDfUd: return "sdc_df_ud";
    case OutcomeClass::SdcTfNud: return "sdc_tf_nud";
    case OutcomeClass::SdcDfNud: return "sdc_df_nud";
    default: return "?";
  }
}

// How a fault got neutralized without a system-level failure.
enum class MaskKind : std::uint8_t {
  Write = 0,     // overwritten word by word
  Update,        // whole-line overwrite
  Insert,        // line replaced (or invalid way reused) at eviction
  Reboot,        // cleared as a side effect of a reboot another fault caused
  DetectValid,   // detected on a clean line, refetched from below
  Correct,       // corrected by the code
  Count_,
};

inline const char* mask_name(MaskKind m) {
  switch (m) {
    case MaskKind::Write: return "mask_write";
    case MaskKind::Update: return "mask_update";
    case MaskKind::Insert: return "mask_insert";
    case MaskKind::Reboot: return "mask_reboot";
    case MaskKind::DetectValid: return "mask_detect_valid";
    case MaskKind::Correct: return "mask_correct";
    default: return "?";
  }
}

// Data-loss event kinds. Line/Word are booked at the moment silent
// corruption lands on a dirty user line; Propagate counts each consuming
// read; PropagateLower counts write-backs that carry corruption down one
// hierarchy level.
enum class DlKind : std::uint8_t {
  Line = 0,
  Word,
  WordPropagate,
  LinePropagateLower,
  WordPropagateLower,
  Count_,
};

inline const char* dl_name(DlKind k) {
  switch (k) {
    case DlKind::Line: return "dl_line";
    case DlKind::Word: return "dl_word";
    case DlKind::WordPropagate: return "dl_word_propagate";
    case DlKind::LinePropagateLower: return "dl_line_propagate_lower";
    case DlKind::WordPropagateLower: return "dl_word_propagate_lower";
    default: return "?";
  }
}

// Source classes for attributing DU/DL failures back to the fault that
// caused them.
enum class FailureSource : std::uint8_t {
  DueTf = 0,
  DueDf,
  SdcTfUd,
  SdcDfUd,
  SdcTfNud,
  SdcDfNud,
  Count_,
};

inline const char* source_name(FailureSource s) {
  switch (s) {
    case FailureSource::DueTf: return "due_tf";
    case FailureSource::DueDf: return "due_df";
    case FailureSource::SdcTfUd: return "sdc_tf_ud";
    case FailureSource::SdcDfUd: return "sdc_df_ud";
    case FailureSource::SdcTfNud: return "sdc_tf_nud";
    case FailureSource::SdcDfNud: return "sdc_df_nud";
    default: return "?";
  }
}

}  // namespace ssvf
