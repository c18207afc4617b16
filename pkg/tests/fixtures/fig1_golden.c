// Expected transformation of fig1.c (compared structurally, not textually).
int x_a_p;
int i_a_p;
int x_a_q;
int i_a_q;
int i;
int k;

main()
{
  i_a_p = i_a_q = nd(0, 99999);
  k = nd();
  i = i_a_p;
  i = i_a_q;
  k = i;
  (i == i_a_p) ? x_a_p = k : k;
  (i == i_a_q) ? x_a_q = k * k : k * k;
  k = nd();
  i = i_a_p;
  i = i_a_q;
  assert((i == i_a_q ? x_a_q : nd()) == (i == i_a_p ? x_a_p : nd()) * (i == i_a_p ? x_a_p : nd()));
  i = nd();
}
