#include "epiveri/generators.hpp"

#include <sstream>

#include "epiveri/diag.hpp"

namespace epiveri {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::BadParams, msg);
}

void emit_skips(std::ostringstream& os, int count) {
  for (int i = 0; i < count; ++i) {
    os << "skip" << (i + 1 < count ? "; " : "\n");
  }
}

std::string generate_dc(int n) {
  require(n >= 3, "dc needs a ring of at least 3 agents");
  std::ostringstream os;
  os << "paid : Bool[" << n << "]\n";
  os << "chan : Bool[" << n << "]\n";
  os << "said : Bool[" << n << "]\n\n";
  os << "init_cond =\n";
  for (int i = 0; i < n; ++i) {
    os << "(";
    bool first = true;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (!first) os << " /\\ ";
      os << "(neg paid[" << j << "])";
      first = false;
    }
    os << ")" << (i + 1 < n ? " \\/" : "") << "\n";
  }
  os << "\n";
  for (int i = 0; i < n; ++i) {
    os << "agent C" << i << " \"dc_agent_protocol\" (paid[" << i << "], chan["
       << i << "], chan[" << (i + 1) % n << "], said, said[" << i << "])\n";
  }
  os << "\n";
  os << "spec_spr_ci = X 3 (Knows C0 (";
  for (int i = 0; i < n; ++i) {
    if (i) os << " /\\ ";
    os << "(neg paid[" << i << "])";
  }
  os << ")) \\/\n";
  os << "   (Knows C0 (paid[0])) \\/\n";
  os << "   (Knows C0 (False";
  for (int i = 1; i < n; ++i) os << " \\/ paid[" << i << "]";
  os << ") /\\\n     ";
  for (int i = 1; i < n; ++i) {
    os << "(neg Knows C0 (neg paid[" << i << "]))";
    if (i + 1 < n) os << " /\\ ";
  }
  os << ")\n\n";
  os << "protocol \"dc_agent_protocol\"\n"
        "(\n"
        "  paid : observable Bool,\n"
        "  chan_left : Bool,\n"
        "  chan_right : Bool,\n"
        "  said : observable Bool[], -- the broadcast variables.\n"
        "  say : Bool\n"
        ")\n\n"
        "coin_left : observable Bool\n"
        "coin_right : observable Bool\n\n"
        "begin\n"
        "  <| chan_right := coin_right |>;\n"
        "  <| coin_left := chan_left |>;\n"
        "  <| say := coin_left xor coin_right xor paid |>;\n"
        "  skip\n"
        "end\n";
  return os.str();
}

std::string generate_otp(int n) {
  require(n >= 1, "otp needs a pad of at least 1 bit");
  std::ostringstream os;
  os << "-- The 'secret' one-time-pad shared between Alice and Bob.\n";
  os << "one_time_pad : Bool[" << n << "]\n";
  os << "-- The communications channel.\n";
  os << "channel : Bool\n\n";
  os << "agent Alice \"sender\" (one_time_pad, channel)\n";
  os << "agent Bob \"receiver\" (one_time_pad, channel)\n";
  os << "agent Eve \"eavesdropper\" (channel)\n\n";
  os << "spec_spr =\n X " << 2 * n
     << " ((neg (Knows Eve Alice.message[0])) /\\"
        " (neg (Knows Eve (neg Alice.message[0]))))\n\n";
  os << "-- Alice's protocol.\n";
  os << "protocol \"sender\" (otp : Bool[" << n << "], chan : Bool)\n\n";
  os << "message : Bool[" << n << "]\n";
  os << "bit : Bool\n\nbegin\n";
  for (int i = 0; i < n; ++i) {
    os << "  <| bit := otp[" << i << "] |>; <| chan := message[" << i
       << "] xor bit |>" << (i + 1 < n ? ";" : "") << "\n";
  }
  os << "end\n\n";
  os << "-- Bob's protocol.\n";
  os << "protocol \"receiver\" (otp : observable Bool[" << n
     << "], chan : observable Bool)\nbegin\n";
  emit_skips(os, 2 * n);
  os << "end\n\n";
  os << "-- Eve's protocol.\n";
  os << "protocol \"eavesdropper\" (chan : observable Bool)\n\nbegin\n";
  emit_skips(os, 2 * n);
  os << "end\n";
  return os.str();
}

std::string generate_ot(int n) {
  require(n >= 1, "ot needs messages of at least 1 bit");
  std::ostringstream os;
  os << "-- Alice's messages\n";
  os << "m0: Bool[" << n << "]\n";
  os << "m1: Bool[" << n << "]\n\n";
  os << "-- A variable used by Bob to store the message received\n";
  os << "mc: Bool[" << n << "]\n\n";
  os << "-- initial randomness\n";
  os << "r0 : Bool[" << n << "]\n";
  os << "r1 : Bool[" << n << "]\n";
  os << "rd : Bool[" << n << "]\n";
  os << "d : Bool\n\n";
  os << "f0 : Bool[" << n << "]\n";
  os << "f1 : Bool[" << n << "]\n";
  os << "e : Bool\n";
  os << "c: Bool\n\n";
  os << "init_cond =\n";
  os << "-- Message rd is determined from r0,r1 and d.\n";
  os << "( neg d => (";
  for (int i = 0; i < n; ++i) {
    if (i) os << " /\\ ";
    os << "(r0[" << i << "] <=> rd[" << i << "])";
  }
  os << ")) /\\\n";
  os << "        (d => (";
  for (int i = 0; i < n; ++i) {
    if (i) os << " /\\ ";
    os << "(r1[" << i << "] <=> rd[" << i << "])";
  }
  os << ")) /\\\n";
  os << "-- The random strings are distinct.\n";
  os << "( ";
  for (int i = 0; i < n; ++i) {
    if (i) os << " \\/ ";
    os << "neg (r0[" << i << "] <=> r1[" << i << "])";
  }
  os << " ) /\\\n";
  os << "-- The messages m0, m1 are distinct.\n";
  os << "( ";
  for (int i = 0; i < n; ++i) {
    if (i) os << " \\/ ";
    os << "neg (m0[" << i << "] <=> m1[" << i << "])";
  }
  os << " )\n\n";
  os << "agent Alice \"alice\" (r0, r1, m0, m1, f0, f1, e)\n";
  os << "agent Bob \"bob\" (e, rd, d, c, f0, f1, mc)\n\n";
  os << "spec_spr =\n"
        "\"[Any]: after two steps, Bob does not know the value of any bit"
        " of m0\"\n";
  os << "X 2 ( c => (";
  for (int i = 0; i < n; ++i) {
    if (i) os << " /\\\n            ";
    os << "neg (Knows Bob m0[" << i << "]) /\\ neg (Knows Bob neg m0[" << i
       << "])";
  }
  os << "))\n\n";
  os << "spec_spr =\n"
        "\"[Single]: after two steps, Bob does not know the value of the"
        " first bit of m0\"\n"
        "X 2 (neg (Knows Bob m0[0]) /\\ neg (Knows Bob neg m0[0]))\n\n";
  os << "spec_spr = \"[Alice] Alice does not learn Bob's choice: \"\n"
        "X 3 ( (neg Knows Alice c) /\\ (neg Knows Alice neg c ) )\n\n";
  os << "protocol \"alice\" (r0 : observable Bool[" << n
     << "], r1: observable Bool[" << n << "],\n"
     << "                  m0 : observable Bool[" << n
     << "], m1: observable Bool[" << n << "],\n"
     << "                  f0 : observable Bool[" << n
     << "], f1: observable Bool[" << n << "],\n"
     << "                  e: observable Bool)\n\n";
  os << "begin\n  skip;\n  <|\n";
  for (int i = 0; i < n; ++i) {
    os << "     f0[" << i << "]:= ( (neg e) /\\ (m0[" << i << "] xor r0[" << i
       << "])) \\/ (e /\\ (m0[" << i << "] xor r1[" << i << "])) ;\n";
    os << "     f1[" << i << "]:= ( (neg e) /\\ (m1[" << i << "] xor r1[" << i
       << "])) \\/ (e /\\ (m1[" << i << "] xor r0[" << i << "]))"
       << (i + 1 < n ? " ;\n\n" : "\n");
  }
  os << "  |>;\n  skip\nend\n\n";
  os << "protocol \"bob\" (e: Bool,\n"
     << "       rd: observable Bool[" << n
     << "], d: observable Bool, c: observable Bool,\n"
     << "       f0: observable Bool[" << n << "], f1: observable Bool[" << n
     << "], mc: observable Bool[" << n << "])\n";
  os << "begin\n <| e:= d xor c |>;\n skip;\n <|\n";
  for (int i = 0; i < n; ++i) {
    os << "   mc[" << i << "]:= ((neg c) /\\ (f0[" << i << "] xor rd[" << i
       << "])) \\/ (c /\\ (f1[" << i << "] xor rd[" << i << "]))"
       << (i + 1 < n ? " ;" : "") << "\n";
  }
  os << " |>\nend\n";
  return os.str();
}

std::string generate_msg(int n) {
  require(n >= 1, "msg needs a delay bound of at least 1");
  std::ostringstream os;
  os << "delay : Bool[" << n << "]\n";
  os << "outA : Bool\n";
  os << "sentA : Bool\n\n";
  os << "inB : Bool\n";
  os << "rcdB : Bool\n\n";
  os << "init_cond = neg (sentA \\/ outA \\/ inB \\/ rcdB)\n\n";
  os << "agent Alice \"sender\" (outA, sentA)\n";
  os << "agent Bob \"receiver\" (inB, rcdB)\n\n";
  os << "transitions\nbegin\n";
  os << "-- delay[0] captures whether transmission is delayed in the"
        " current step\n";
  os << "-- if there is no delay and Alice has sent, then Bob receives\n\n";
  os << "rcdB := rcdB \\/ (neg delay[0] /\\ sentA );\n";
  os << "inB := (neg delay[0] /\\ sentA /\\ outA) \\/ ((delay[0] \\/ neg"
        " sentA) /\\ inB);\n\n";
  os << "-- delay starts out random, and shifts from right to left\n\n";
  for (int i = 0; i + 1 < n; ++i) {
    os << "delay[" << i << "] := delay[" << i + 1 << "];\n";
  }
  os << "delay[" << n - 1 << "] := False\n";
  os << "end\n\n";
  os << "spec_spr = X " << n + 1
     << " Knows Alice (Knows Bob (Knows Alice (Knows Bob (Knows Alice"
        " rcdB ))))\n\n";
  os << "-- Alice's protocol.\n";
  os << "protocol \"sender\" (chan : Bool, sent : Bool )\n\n";
  os << "x: Bool\n\nbegin\n";
  os << "<| chan := x |> ;\n<| sent := True |> ;\n";
  emit_skips(os, n);
  os << "end\n\n";
  os << "-- Bob's protocol.\n";
  os << "protocol \"receiver\" (chanin: observable Bool, rcd: observable"
        " Bool)\n\nbegin\n";
  emit_skips(os, n + 1);
  os << "end\n";
  return os.str();
}

}  // namespace

std::string generate_twophase(int agents, int slots) {
  require(agents >= 2, "twophase needs at least 2 agents");
  require(slots >= 1, "twophase needs at least 1 slot");
  std::ostringstream os;
  os << "type Slot = {0.." << slots << "}\n";
  for (int i = 0; i < agents; ++i) {
    os << "slotsC" << i << " : Bool[Slot]\n";
  }
  os << "say : Bool[" << agents << "]\n";
  os << "round_result : Bool\n\n";
  os << "init_cond =\n";
  for (int i = 0; i < agents; ++i) {
    for (int p = 0; p <= slots; ++p) {
      for (int q = p + 1; q <= slots; ++q) {
        os << "(neg (slotsC" << i << "[" << p << "] /\\ slotsC" << i << "["
           << q << "])) /\\" << (q == slots ? "\n" : " ");
      }
    }
  }
  for (int i = 0; i < agents; ++i) {
    os << "(";
    for (int p = 0; p <= slots; ++p) {
      if (p) os << " \\/ ";
      os << "slotsC" << i << "[" << p << "]";
    }
    os << ")" << (i + 1 < agents ? " /\\" : "") << "\n";
  }
  os << "\n";
  for (int i = 0; i < agents; ++i) {
    os << "agent C" << i << " \"twophase_protocol\" (slotsC" << i << ", say["
       << i << "], round_result)\n";
  }
  os << "\ntransitions\nbegin\nround_result := ";
  for (int i = 0; i < agents; ++i) {
    if (i) os << " xor ";
    os << "say[" << i << "]";
  }
  os << "\nend\n\n";
  os << "-- rcvdX = I know someone else is sending X\n\n";
  os << "spec_spr = X " << 4 * slots + 1 << " C0.rcvd1 <=>\nKnows C0 (";
  for (int i = 1; i < agents; ++i) {
    if (i > 1) os << " \\/ ";
    os << "(neg slotsC" << i << "[0] /\\ C" << i << ".message)";
  }
  os << ")\n\n";
  os << "protocol \"twophase_protocol\"\n"
        "(\n"
        "  slot_request: observable Bool[],\n"
        "  say : Bool,\n"
        "  round_result: observable Bool\n"
        ")\n\n"
        "-- the following variables are initialised nondeterministically:\n\n"
        "-- the message the agent sends, if any\n"
        "message : observable Bool\n\n"
        "-- the result for each DC round\n"
        "-- rri = message received in booking round i\n";
  for (int j = 1; j <= slots; ++j) {
    os << "rr" << j << " : Bool\n";
  }
  os << "\n--  rcvdX = I know a message X has been sent by someone else\n"
        "rcvd0 : Bool\n"
        "rcvd1 : Bool\n\n"
        "begin\n"
        "-- reservation phase\n";
  for (int j = 1; j <= slots; ++j) {
    os << "<| say := slot_request[" << j << "] |>;\n\n";
    os << "<| rr" << j << " := round_result |>;\n\n";
  }
  os << "--initialize rcvd vars\n"
        "<| rcvd0:= False ; rcvd1 := False |>;\n\n"
        "-- Sending phase:\n";
  for (int j = 1; j <= slots; ++j) {
    os << "<| say := (slot_request[" << j << "] /\\ rr" << j
       << " /\\ message ) |> ;\n\n";
    os << "<|\n    rcvd1 := rcvd1 \\/ (neg slot_request[" << j << "] /\\ rr"
       << j << " /\\ round_result) \\/\n             (slot_request[" << j
       << "] /\\ rr" << j << " /\\ (message xor round_result));\n\n";
    os << "    rcvd0 := rcvd0 \\/ (neg slot_request[" << j << "] /\\ rr" << j
       << " /\\ neg round_result) \\/\n             (slot_request[" << j
       << "] /\\ rr" << j << " /\\ (message xor round_result))\n|>"
       << (j < slots ? " ;" : "") << "\n\n";
  }
  os << "end\n";
  return os.str();
}

std::string generate_family(const std::string& family, int size) {
  if (family == "dc") return generate_dc(size);
  if (family == "otp") return generate_otp(size);
  if (family == "ot") return generate_ot(size);
  if (family == "msg") return generate_msg(size);
  if (family == "twophase") return generate_twophase(size, size);
  throw Error(ErrorKind::BadParams, "unknown family '" + family + "'");
}

}  // namespace epiveri
