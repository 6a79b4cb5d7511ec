#pragma once

// A process-global step counter. bump() moves it and returns the new
// position; tests reset it up front.
void reset_counter();
int bump(int delta);
int counter_value();
