#pragma once

// Integer line codec: every codeword carries a parity bit in the low
// position, so well-formed codewords always have even population count.
int encode(int value);
int decode(int code);
bool has_even_parity(int code);
