#pragma once

// Remainder of a non-negative value modulo 3.
int mod3(int value);
