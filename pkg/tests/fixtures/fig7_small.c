// Scaled copy of fig7.c (sizes 4 and 2) for exhaustive enumeration.
int i, x, y;
int a[4], b[2];

main()
{
  x = user_input();
  y = user_input();
  for (i = 0; i < 2; i++)
  {
    a[i] = x;
    b[i] = y;
    a[i + 2] = x * 2;
    x = x + 1;
    y = y + 1;
  }
  for (i = 0; i < 2; i++)
  {
    assert(a[i] * 2 == a[i + 2]);
  }
}
